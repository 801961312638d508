#pragma once

#include <cstddef>
#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hk {

// Unordered agent pair, stored 0-based with i < j.
struct Pair {
    std::size_t i = 0;
    std::size_t j = 0;
    auto operator<=>(const Pair&) const = default;
};

Pair make_pair_checked(std::size_t a, std::size_t b);

enum class Variant { OpenAtOne, ClosedAtOne };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& s);

// Scalar interaction profile phi on [0,1].
class Kernel1D {
public:
    static Kernel1D constant(double c);
    // phi(r) = a + b r
    static Kernel1D affine(double a, double b);
    // Linear interpolation through (r_k, v_k); r must start at 0 and end at 1.
    static Kernel1D table(std::vector<double> r, std::vector<double> v);

    double operator()(double r) const;
    double lipschitz() const { return lip_; }
    double sup() const { return sup_; }
    bool is_constant() const { return kind_ == Kind::Constant; }
    // Phi(r) = int_0^{min(r,1)} phi(s) s ds
    double potential(double r) const;
    std::string describe() const;

    const std::vector<double>& nodes() const { return r_; }
    const std::vector<double>& values() const { return v_; }

    bool operator==(const Kernel1D& o) const;

private:
    enum class Kind { Constant, Affine, Table };
    Kind kind_ = Kind::Constant;
    double a_ = 1.0, b_ = 0.0;
    std::vector<double> r_, v_;
    double lip_ = 0.0, sup_ = 1.0;
};

class InteractionKernel {
public:
    InteractionKernel() = default;
    static InteractionKernel constant(std::size_t agents, double c = 1.0);
    static InteractionKernel uniform(std::size_t agents, Kernel1D phi);

    // Overrides the profile of one pair (both orientations).
    void set_pair(std::size_t i, std::size_t j, Kernel1D phi);

    std::size_t agents() const { return n_; }
    const Kernel1D& pair(std::size_t i, std::size_t j) const;
    double phi(std::size_t i, std::size_t j, double r) const { return pair(i, j)(r); }
    double lipschitz(std::size_t i, std::size_t j) const { return pair(i, j).lipschitz(); }
    double max_sup() const;
    // Set when every pair uses the same constant profile.
    std::optional<double> uniform_constant() const;
    bool is_unit() const;
    const Kernel1D& default_profile() const { return def_; }
    const std::map<std::pair<std::size_t, std::size_t>, Kernel1D>& overrides() const { return over_; }

    // Rows "i j r value" (1-based agents) after a header line; every pair must be listed.
    static InteractionKernel load_table(std::istream& in, std::size_t agents);
    void write_table(std::ostream& out, std::size_t samples = 11) const;

private:
    std::size_t n_ = 0;
    Kernel1D def_ = Kernel1D::constant(1.0);
    std::map<std::pair<std::size_t, std::size_t>, Kernel1D> over_;
};

class Configuration {
public:
    Configuration() = default;
    Configuration(std::size_t agents, std::size_t dim, std::vector<double> positions,
                  std::vector<double> weights = {});
    // Agents on a line.
    static Configuration line(const std::vector<double>& xs);

    std::size_t agents() const { return N_; }
    std::size_t dim() const { return n_; }
    const std::vector<double>& positions() const { return x_; }
    std::span<const double> point(std::size_t i) const { return {x_.data() + i * n_, n_}; }
    double coord(std::size_t i, std::size_t k) const { return x_[i * n_ + k]; }
    // Lumped multiplicities; empty means every agent counts once.
    const std::vector<double>& weights() const { return w_; }
    double weight(std::size_t i) const { return w_.empty() ? 1.0 : w_[i]; }
    bool weighted() const { return !w_.empty(); }
    double total_weight() const;

    Configuration with_positions(std::vector<double> positions) const;

private:
    std::size_t N_ = 0, n_ = 0;
    std::vector<double> x_, w_;
};

double squared_distance(std::span<const double> x, std::size_t n, std::size_t i, std::size_t j);

// v_i += w_j a (x_j - x_i), v_j += w_i a (x_i - x_j)
void add_pair_velocity(std::span<double> v, std::span<const double> x, std::size_t n,
                       std::size_t i, std::size_t j, double a, double wi, double wj);

std::vector<double> rhs(const Configuration& config, const InteractionKernel& kernel, Variant variant);

// Velocity of the graph-restricted dynamics; coefficients of listed pairs scaled by `scale`
// when supplied (used for sliding coefficients).
void graph_velocity(std::span<const double> x, const Configuration& shape, const InteractionKernel& kernel,
                    const std::vector<Pair>& edges, std::span<double> out,
                    const std::vector<double>* scale = nullptr);

using VelocitySelection = std::map<Pair, double>;

constexpr double kBoundaryTol = 1e-12;

std::vector<Pair> boundary_pairs(const Configuration& config, double tol);

std::vector<double> filippov_velocity(const Configuration& config, const InteractionKernel& kernel,
                                      const VelocitySelection& selection, double tol = kBoundaryTol);

struct SublinearReport {
    bool ok = true;
    double bound = 0.0;
    double norm_all_off = 0.0;
    double norm_all_on = 0.0;
};

SublinearReport sublinear_bound_check(const Configuration& config, const InteractionKernel& kernel,
                                      double tol = kBoundaryTol);

void check_kernel(const Configuration& config, const InteractionKernel& kernel);

}  // namespace hk
