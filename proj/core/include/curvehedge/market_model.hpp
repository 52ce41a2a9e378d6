#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace curvehedge {

/// Absolute tolerance (years) used when matching a maturity against curve nodes.
inline constexpr double kMaturityTolerance = 1e-9;

/// Tolerance on the forward-curve normalization identity sum_k nu_k P^(T_k) = 1.
inline constexpr double kNormalizationTolerance = 1e-12;

inline bool same_maturity(double a, double b) {
    return (a > b ? a - b : b - a) <= kMaturityTolerance;
}

/// Raised when a maturity is not present on a curve.
class LookupError : public std::out_of_range {
public:
    explicit LookupError(double maturity);
    double maturity() const { return maturity_; }

private:
    double maturity_;
};

/// Ordered payment dates T_i < ... < T_j together with exercise T and settlement S.
struct TenorStructure {
    std::vector<double> maturities;
    double exercise = 0.0;
    double settlement = 0.0;

    /// Builds and validates; throws std::invalid_argument naming the violated ordering.
    static TenorStructure make(std::vector<double> maturities, double exercise, double settlement);

    void validate() const;
    /// tau_k = T_{k+1} - T_k
    std::vector<double> spacings() const;
    double first() const { return maturities.front(); }
    double last() const { return maturities.back(); }
};

struct Atom {
    double maturity;
    double weight;

    bool operator==(const Atom&) const = default;
};

/// Signed finite sum of Dirac masses sum_k w_k delta_{T_k}.
///
/// Atoms are kept sorted by maturity; atoms closer than kMaturityTolerance are
/// merged by adding their weights, so maturities are always distinct.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    explicit DiscreteMeasure(std::vector<Atom> atoms);

    static DiscreteMeasure dirac(double maturity, double weight = 1.0);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    /// Weight carried at `maturity`, zero when it is not an atom.
    double weight_at(double maturity) const;
    bool has_atom(double maturity) const;
    std::vector<double> support() const;
    bool all_weights_positive() const;

    DiscreteMeasure scaled(double factor) const;
    DiscreteMeasure operator+(const DiscreteMeasure& other) const;
    DiscreteMeasure operator-(const DiscreteMeasure& other) const;

    bool operator==(const DiscreteMeasure& other) const = default;

private:
    std::vector<Atom> atoms_;
};

/// Values of a curve at a finite, sorted set of maturities observed at time t.
class Curve {
public:
    Curve(double t, std::vector<double> maturities, std::vector<double> values);

    double time() const { return time_; }
    std::span<const double> maturities() const { return maturities_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return maturities_.size(); }

    std::optional<std::size_t> find(double maturity) const;
    /// Node index of `maturity`; throws LookupError if absent.
    std::size_t index_of(double maturity) const;
    bool contains(double maturity) const { return find(maturity).has_value(); }
    /// Value at `maturity`; throws LookupError if absent.
    double at(double maturity) const;

protected:
    double time_;
    std::vector<double> maturities_;
    std::vector<double> values_;
};

/// Zero-coupon bond prices P_t(y).
class BondCurve : public Curve {
public:
    using Curve::Curve;
    static BondCurve from_points(double t, std::vector<std::pair<double, double>> points);
};

/// Bond prices divided by the numeraire P_t(nu); pairs to exactly one against nu.
class ForwardCurve : public Curve {
public:
    /// Throws std::domain_error if the normalization identity fails beyond 1e-12.
    ForwardCurve(double t, DiscreteMeasure numeraire, std::vector<double> maturities,
                 std::vector<double> values);

    const DiscreteMeasure& numeraire() const { return numeraire_; }
    /// |sum_k nu_k P^(T_k) - 1|
    double normalization_error() const;

private:
    DiscreteMeasure numeraire_;
};

/// <m, P_t> = sum_k w_k P_t(T_k).
double measure_pair(const Curve& curve, const DiscreteMeasure& m);

/// P^_t = P_t / P_t(nu). Throws std::domain_error when P_t(nu) <= 0.
ForwardCurve forward_normalize(const Curve& curve, const DiscreteMeasure& nu);
/// Re-normalizing by the curve's own numeraire returns it unchanged.
ForwardCurve forward_normalize(const ForwardCurve& curve, const DiscreteMeasure& nu);

/// Simple forward rate L(t,T,S) = (P_t(T) - P_t(S)) / ((S-T) P_t(S)).
double libor_rate(const Curve& curve, double T, double S);

/// mu = delta_{T_i} - delta_{T_j}
DiscreteMeasure swap_floating_leg(const TenorStructure& tenor);
/// nu = sum_k tau_k delta_{T_{k+1}}
DiscreteMeasure swap_annuity(const TenorStructure& tenor);
/// (P_t(T_i) - P_t(T_j)) / sum_k tau_k P_t(T_{k+1}); throws std::domain_error on a nonpositive annuity.
double swap_rate(const Curve& curve, const TenorStructure& tenor);

/// A measure resolved against the node list of a curve, for inner loops.
struct NodeWeight {
    std::size_t node;
    double weight;
};
std::vector<NodeWeight> resolve_nodes(const DiscreteMeasure& m, std::span<const double> maturities);
double pair_nodes(std::span<const NodeWeight> m, std::span<const double> values);

/// Sorted union of the given maturities with duplicates (within tolerance) removed.
std::vector<double> merge_maturities(std::vector<double> maturities);

}  // namespace curvehedge
