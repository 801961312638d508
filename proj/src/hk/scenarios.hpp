#pragma once

#include "hk/trajectory.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hk {

Scenario toy_two_agents(double x10, double x20, Variant variant);

enum class IcCase { A, B, C, D, E };

IcCase parse_ic_case(const std::string& s);

// params = {x1, x3} with x2 = 0; IC-E takes none. Empty params pick a default member of the case.
Scenario three_agents(IcCase c, const std::vector<double>& params = {}, Variant variant = Variant::OpenAtOne);

Scenario square4(Variant variant);

struct DistancingBranches {
    std::string constant;
    std::string interacting;
};

// Group sizes N_1 < N_2 < ...; epsilons[k] applies to level k + 2 (0 or missing: automatic).
// Lumped groups are one weighted agent each; otherwise every member is a separate agent.
Scenario distancing(int levels, const std::vector<std::size_t>& group_sizes, const std::vector<double>& epsilons = {},
                    bool lumped = true);
DistancingBranches distancing_branches(int levels);

struct ClssConstants {
    double eps = 0.1;
    double T = 0.01;
    double B = 0.0;
    double a = 0.0;  // 1/2 - 2 eps
    double s = 0.0;  // sqrt(1 - a^2)
};

ClssConstants clss_constants();
Scenario clss_ten_agents();
// Non-interacting reference (agents 1,2 apart from the two groups), flat 10 x 2.
std::vector<double> clss_reference_x(double t);
// Reference where agent 1 joins the groups at T and agent 2 at T_b.
std::vector<double> clss_reference_y(double t);
double clss_Tb();

Scenario remark71_scenario(double eps);

std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string& name);

void write_scenario(std::ostream& out, const Scenario& sc);
Scenario read_scenario(std::istream& in);

}  // namespace hk
