#include "hk/io.hpp"

#include "hk/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace hk {

std::string format_number(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string format_pair(Pair p) { return std::to_string(p.i + 1) + "-" + std::to_string(p.j + 1); }

Pair parse_pair(const std::string& s) {
    auto dash = s.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == s.size()) fail(ErrorKind::Parse, "bad pair '" + s + "'");
    char* end = nullptr;
    long a = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + dash) fail(ErrorKind::Parse, "bad pair '" + s + "'");
    long b = std::strtol(s.c_str() + dash + 1, &end, 10);
    if (*end != '\0' || a < 1 || b < 1) fail(ErrorKind::Parse, "bad pair '" + s + "'");
    return make_pair_checked(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1));
}

CrossingClass parse_crossing_class(const std::string& s) {
    for (auto c : {CrossingClass::Separating, CrossingClass::Merging, CrossingClass::Degenerate,
                   CrossingClass::MultiplePair, CrossingClass::Bidirectional})
        if (s == crossing_class_name(c)) return c;
    fail(ErrorKind::Parse, "unknown crossing class '" + s + "'");
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "# agents " << traj.agents() << " dim " << traj.dim() << '\n';
    if (!traj.weights().empty()) {
        out << "# weights";
        for (auto w : traj.weights()) out << ' ' << format_number(w);
        out << '\n';
    }
    for (const auto& [k, v] : traj.info) out << "# info " << k << ' ' << format_number(v) << '\n';
    out << 't';
    for (std::size_t i = 0; i < traj.agents(); ++i)
        for (std::size_t c = 0; c < traj.dim(); ++c) out << ",x" << i + 1 << '_' << c + 1;
    out << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << format_number(traj.times()[k]);
        for (auto v : traj.state(k)) out << ',' << format_number(v);
        out << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    std::size_t N = 0, n = 0;
    std::vector<double> weights;
    std::vector<std::pair<std::string, double>> info;
    bool header = false;
    Trajectory tr;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "agents") {
                std::string d;
                if (!(ls >> N >> d >> n) || d != "dim") fail(ErrorKind::Parse, "bad shape comment");
            } else if (key == "weights") {
                double w;
                while (ls >> w) weights.push_back(w);
            } else if (key == "info") {
                std::string k;
                double v;
                if (ls >> k >> v) info.emplace_back(k, v);
            }
            continue;
        }
        if (!header) {
            std::istringstream hs(line);
            std::string cell;
            std::size_t cols = 0;
            std::size_t maxi = 0, maxc = 0;
            while (std::getline(hs, cell, ',')) {
                if (cols++ == 0) {
                    if (cell != "t") fail(ErrorKind::Parse, "first column must be t");
                    continue;
                }
                unsigned a = 0, b = 0;
                if (std::sscanf(cell.c_str(), "x%u_%u", &a, &b) != 2) fail(ErrorKind::Parse, "bad column '" + cell + "'");
                maxi = std::max<std::size_t>(maxi, a);
                maxc = std::max<std::size_t>(maxc, b);
            }
            if (N == 0) N = maxi, n = maxc;
            if (N * n + 1 != cols || N == 0) fail(ErrorKind::Parse, "column count does not match the shape");
            if (!weights.empty() && weights.size() != N) fail(ErrorKind::Parse, "weights do not match the agent count");
            tr = Trajectory(N, n, weights);
            header = true;
            continue;
        }
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            auto comma = line.find(',', pos);
            std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            char* end = nullptr;
            double v = std::strtod(cell.c_str(), &end);
            while (end && (*end == ' ' || *end == '\r')) ++end;
            if (end == cell.c_str() || *end != '\0') fail(ErrorKind::Parse, "bad number on line " + std::to_string(lineno));
            row.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (row.size() != N * n + 1) fail(ErrorKind::Parse, "wrong field count on line " + std::to_string(lineno));
        double t = row[0];
        if (!tr.empty() && t <= tr.final_time()) fail(ErrorKind::Parse, "times must increase (line " + std::to_string(lineno) + ")");
        row.erase(row.begin());
        tr.append(t, row);
    }
    if (!header || tr.empty()) fail(ErrorKind::Parse, "trajectory file has no samples");
    for (auto& [k, v] : info) tr.info[k] = v;
    return tr;
}

void write_events(std::ostream& out, const Trajectory& traj) {
    out << "time\tpairs\tclasses\taction\n";
    for (const auto& e : traj.events()) {
        out << format_number(e.time) << '\t';
        for (std::size_t k = 0; k < e.pairs.size(); ++k) out << (k ? "," : "") << format_pair(e.pairs[k]);
        if (e.pairs.empty()) out << '-';
        out << '\t';
        for (std::size_t k = 0; k < e.classes.size(); ++k) out << (k ? "," : "") << crossing_class_name(e.classes[k]);
        if (e.classes.empty()) out << '-';
        out << '\t' << (e.action.empty() ? "-" : e.action) << '\n';
    }
}

void read_events(std::istream& in, Trajectory& traj) {
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (first) {
            first = false;
            if (line.rfind("time", 0) == 0) continue;
        }
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, '\t')) f.push_back(cell);
        if (f.size() != 4) fail(ErrorKind::Parse, "event line needs 4 fields");
        EventRecord e;
        char* end = nullptr;
        e.time = std::strtod(f[0].c_str(), &end);
        if (end == f[0].c_str()) fail(ErrorKind::Parse, "bad event time");
        auto split = [](const std::string& s) {
            std::vector<std::string> out;
            if (s == "-") return out;
            std::istringstream ss(s);
            std::string p;
            while (std::getline(ss, p, ',')) out.push_back(p);
            return out;
        };
        for (const auto& p : split(f[1])) e.pairs.push_back(parse_pair(p));
        for (const auto& c : split(f[2])) e.classes.push_back(parse_crossing_class(c));
        e.action = f[3] == "-" ? "" : f[3];
        traj.add_event(std::move(e));
    }
}

void write_summary(std::ostream& out, const Summary& s) {
    for (const auto& [k, v] : s) out << k << '=' << v << '\n';
}

}  // namespace hk
