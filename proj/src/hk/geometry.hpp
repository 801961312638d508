#pragma once

#include "hk/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace hk {

double theta(const Configuration& config, std::size_t i, std::size_t j);

// (x_i - x_j) . (sum_{k != i,j} a_ik w_k (x_k - x_i) - sum_{k != i,j} a_jk w_k (x_k - x_j))
double alpha(const Configuration& config, std::size_t i, std::size_t j, const InteractionKernel& kernel,
             Variant variant);

// (x_i - x_j) . (v_i - v_j); half the derivative of theta_ij along v.
double normal_rate(std::span<const double> x, std::span<const double> v, std::size_t n, std::size_t i,
                   std::size_t j);

// Drop in normal_rate caused by switching the pair on: phi_ij(1) (w_i + w_j).
double activation_jump(const Configuration& config, const InteractionKernel& kernel, std::size_t i, std::size_t j);

enum class CrossingClass { Separating, Merging, Degenerate, MultiplePair, Bidirectional };

const char* crossing_class_name(CrossingClass c);

CrossingClass classify_crossing(const Configuration& config, std::size_t i, std::size_t j,
                                const InteractionKernel& kernel, Variant variant, double tol = 1e-9);

struct Partition {
    std::vector<std::vector<std::size_t>> blocks;
    bool operator==(const Partition&) const = default;
    auto operator<=>(const Partition&) const = default;
    std::size_t size() const { return blocks.size(); }
};

// Blocks sorted internally and by their first member.
Partition canonical_partition(std::vector<std::vector<std::size_t>> blocks);

Partition coincidence_partition(const Configuration& config, double tol);

// Points stored flat, `dim` coordinates each.
struct PointSet {
    std::size_t dim = 1;
    std::vector<double> coords;
    std::size_t size() const { return dim ? coords.size() / dim : 0; }
    std::span<const double> point(std::size_t k) const { return {coords.data() + k * dim, dim}; }
};

PointSet points_of(const Configuration& config);

// Euclidean distance from q to the convex hull of `outer`.
double hull_distance(const PointSet& outer, std::span<const double> q);

bool hull_contains(const PointSet& outer, const PointSet& inner, double tol);

}  // namespace hk
