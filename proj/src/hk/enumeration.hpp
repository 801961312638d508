#pragma once

#include "hk/solvers.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hk {

struct Composition {
    std::vector<std::size_t> parts;
    std::size_t total() const;
    bool adjacency_ok() const;  // n_k + n_{k+1} >= 3 throughout
    std::string describe() const;  // "(2,1)"
    bool operator==(const Composition&) const = default;
};

// All compositions of N, larger first parts first: (3), (2,1), (1,2), (1,1,1).
std::vector<Composition> delta1(std::size_t N);
std::vector<Composition> delta2(std::size_t N);

// Agents grouped into consecutive blocks.
Partition composition_partition(const Composition& comp);

struct BlockLimit {
    Composition composition;
    std::vector<double> block_positions;
    std::vector<double> agent_limits;
};

BlockLimit limit_state(const Configuration& initial, const Composition& comp);

// One wait per block, or one per block with at least two agents. Chain pairs inside a block wait
// their block's time; pairs joining two blocks never activate.
BranchSpec branch_specs_from_composition(const Composition& comp, const std::vector<double>& waits);

struct ExplorationResult {
    Composition composition;
    bool valid = false;
    std::string error;
    Partition terminal;
    std::vector<double> final_state;
};

// Every on/off choice of the chain pairs at time 0 on unit-spaced data under the given variant.
std::vector<ExplorationResult> explore_zero_wait(std::size_t N, Variant variant, double horizon = 30.0);

struct SquareRealization {
    std::string set;     // "" or "A1"/"A2"
    std::string branch;  // open-variant representative
    std::string closed_branch;  // zero-wait representative
    std::size_t claimed_clusters = 0;
    std::vector<std::vector<double>> claimed_limits;  // empty when not stated
};

struct SquareFamily {
    int id = 0;
    std::string description;
    int arity = 0;
    bool closed_member = false;
    std::vector<SquareRealization> realizations;
};

std::vector<SquareFamily> square4_catalogue();

struct SquareOutcome {
    int id = 0;
    std::string set;
    bool ok = false;
    std::string error;
    std::size_t clusters = 0;
    std::vector<std::vector<double>> limits;  // cluster positions
    std::vector<double> final_state;
};

std::vector<SquareOutcome> simulate_square_catalogue(Variant variant, double horizon = 30.0);

// Cluster count -> number of distinct limit configurations among successful outcomes.
std::map<std::size_t, std::size_t> square_histogram(const std::vector<SquareOutcome>& outcomes, double tol = 1e-6);

// Claimed histogram of the stored catalogue.
std::map<std::size_t, std::size_t> square_claimed_histogram();

void write_square_catalogue(std::ostream& out, const std::vector<SquareOutcome>& outcomes);
void write_composition_catalogue(std::ostream& out, std::size_t N, Variant variant);

}  // namespace hk
