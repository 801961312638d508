#include "hk/integrator.hpp"

#include "hk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hk {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct Dense {
    double t0 = 0, h = 0;
    std::vector<double> r1, r2, r3, r4, r5;
    void eval(double t, std::vector<double>& out) const {
        double s = (t - t0) / h;
        double s1 = 1.0 - s;
        out.resize(r1.size());
        for (std::size_t i = 0; i < r1.size(); ++i)
            out[i] = r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
    }
};

class Stepper {
public:
    Stepper(const VectorField& f, std::size_t dim, double rtol, double atol)
        : f_(f), dim_(dim), rtol_(rtol), atol_(atol) {
        for (auto* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &y1_}) k->assign(dim, 0.0);
    }

    void init(const std::vector<double>& x) {
        f_(x, k1_);
        have_k1_ = true;
    }

    // Attempts one step of size h from x; on success y1() holds the new state and dense is filled.
    bool attempt(double t, const std::vector<double>& x, double h, double& err, Dense& dense) {
        if (!have_k1_) init(x);
        const std::size_t n = dim_;
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * a21 * k1_[i];
        f_(tmp_, k2_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        f_(tmp_, k3_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        f_(tmp_, k4_);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = x[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        f_(tmp_, k5_);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = x[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
        f_(tmp_, k6_);
        for (std::size_t i = 0; i < n; ++i)
            y1_[i] = x[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
        f_(y1_, k7_);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
            double sc = atol_ + rtol_ * std::max(std::abs(x[i]), std::abs(y1_[i]));
            acc += (e / sc) * (e / sc);
        }
        err = n ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
        if (err > 1.0) return false;
        dense.t0 = t;
        dense.h = h;
        dense.r1 = x;
        dense.r2.resize(n);
        dense.r3.resize(n);
        dense.r4.resize(n);
        dense.r5.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double ydiff = y1_[i] - x[i];
            double bspl = h * k1_[i] - ydiff;
            dense.r2[i] = ydiff;
            dense.r3[i] = bspl;
            dense.r4[i] = ydiff - h * k7_[i] - bspl;
            dense.r5[i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] + d7 * k7_[i]);
        }
        return true;
    }

    void accept() { std::swap(k1_, k7_); }
    const std::vector<double>& y1() const { return y1_; }

private:
    const VectorField& f_;
    std::size_t dim_;
    double rtol_, atol_;
    bool have_k1_ = false;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y1_;
};

double max_value(const std::vector<double>& g) {
    double m = -INFINITY;
    for (double v : g) m = std::max(m, v);
    return m;
}

}  // namespace

SegmentOutcome integrate_segment(const VectorField& f, const EventFunction* events, double t0,
                                 std::vector<double> x0, double t_stop, const IntegratorOptions& opt,
                                 Trajectory* out, const StepHook* hook) {
    SegmentOutcome res;
    res.t = t0;
    res.x = std::move(x0);
    if (!(t_stop > t0)) return res;

    const std::size_t n = res.x.size();
    Stepper st(f, n, opt.rtol, opt.atol);
    Dense dense;
    std::vector<double> g, xs;
    double h = std::min({opt.max_step, t_stop - t0, 1e-3});
    double t = t0;
    std::vector<double> x = res.x;
    const double dt = opt.sample_dt;
    auto next_grid = [&](double after) {
        double k = std::floor(after / dt + 1e-9) + 1.0;
        return k * dt;
    };
    double tg = next_grid(t0);

    for (std::size_t steps = 0;; ++steps) {
        if (steps > opt.max_steps) fail(ErrorKind::Integrator, "step budget exhausted");
        bool last = false;
        if (t + h >= t_stop) {
            h = t_stop - t;
            last = true;
        }
        double err = 0.0;
        if (!st.attempt(t, x, h, err, dense)) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                std::ostringstream os;
                os << "step size underflow at t=" << t;
                fail(ErrorKind::Integrator, os.str());
            }
            continue;
        }
        double t_new = last ? t_stop : t + h;

        // Event scan over interior check points and the step end.
        double t_hit = -1.0;
        double t_lo = t;
        if (events) {
            const int C = opt.interior_checks;
            for (int m = 1; m <= C + 1; ++m) {
                double tau = m == C + 1 ? t_new : t + h * m / (C + 1);
                if (m == C + 1)
                    xs = st.y1();
                else
                    dense.eval(tau, xs);
                (*events)(xs, g);
                if (!g.empty() && max_value(g) > opt.trigger) {
                    double a = t_lo, b = tau;
                    while (b - a > opt.event_time_tol) {
                        double mid = 0.5 * (a + b);
                        dense.eval(mid, xs);
                        (*events)(xs, g);
                        if (max_value(g) > 0.5 * opt.trigger)
                            b = mid;
                        else
                            a = mid;
                    }
                    t_hit = b;
                    break;
                }
                t_lo = tau;
            }
        }

        double t_end = t_hit >= 0.0 ? t_hit : t_new;
        if (out) {
            while (tg < t_end - 1e-13) {
                dense.eval(tg, xs);
                out->append(tg, xs);
                tg += dt;
                tg = next_grid(tg - 0.5 * dt);
            }
        }
        if (t_hit >= 0.0) {
            dense.eval(t_hit, xs);
            res.t = t_hit;
            res.x = xs;
            res.event = true;
            (*events)(xs, g);
            for (std::size_t k = 0; k < g.size(); ++k)
                if (g[k] > 0.5 * opt.trigger) res.fired.push_back(k);
            if (out) out->append(res.t, res.x);
            return res;
        }
        st.accept();
        t = t_new;
        x = st.y1();
        if (hook) (*hook)(t, x);
        if (last) break;
        double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h = std::min(opt.max_step, h * std::clamp(fac, 0.2, 5.0));
    }
    res.t = t_stop;
    res.x = x;
    if (out) out->append(res.t, res.x);
    return res;
}

}  // namespace hk
