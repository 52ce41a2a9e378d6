#include "curvehedge/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curvehedge {

namespace {

std::string describe_maturity(double maturity) {
    std::ostringstream os;
    os.precision(12);
    os << "maturity " << maturity << " not present on curve";
    return os.str();
}

}  // namespace

LookupError::LookupError(double maturity)
    : std::out_of_range(describe_maturity(maturity)), maturity_(maturity) {}

// ---------------------------------------------------------------------------
// TenorStructure

TenorStructure TenorStructure::make(std::vector<double> maturities, double exercise,
                                    double settlement) {
    TenorStructure tenor{std::move(maturities), exercise, settlement};
    tenor.validate();
    return tenor;
}

void TenorStructure::validate() const {
    if (maturities.size() < 2) {
        throw std::invalid_argument("tenor structure needs at least two maturities T_i < T_j");
    }
    if (!(exercise <= maturities.front() + kMaturityTolerance)) {
        throw std::invalid_argument("tenor ordering violated: exercise T must not exceed T_i");
    }
    if (!(exercise <= settlement + kMaturityTolerance)) {
        throw std::invalid_argument("tenor ordering violated: exercise T must not exceed settlement S");
    }
    for (std::size_t k = 0; k + 1 < maturities.size(); ++k) {
        if (!(maturities[k + 1] - maturities[k] > kMaturityTolerance)) {
            throw std::invalid_argument(
                "tenor ordering violated: maturities must be strictly increasing (T_i < ... < T_j)");
        }
    }
}

std::vector<double> TenorStructure::spacings() const {
    std::vector<double> tau;
    tau.reserve(maturities.size() - 1);
    for (std::size_t k = 0; k + 1 < maturities.size(); ++k) {
        tau.push_back(maturities[k + 1] - maturities[k]);
    }
    return tau;
}

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) {
    for (const auto& a : atoms) {
        if (!std::isfinite(a.maturity) || !std::isfinite(a.weight)) {
            throw std::invalid_argument("measure atoms must be finite");
        }
    }
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& a, const Atom& b) { return a.maturity < b.maturity; });
    for (const auto& a : atoms) {
        if (!atoms_.empty() && same_maturity(atoms_.back().maturity, a.maturity)) {
            atoms_.back().weight += a.weight;
        } else {
            atoms_.push_back(a);
        }
    }
}

DiscreteMeasure DiscreteMeasure::dirac(double maturity, double weight) {
    return DiscreteMeasure({Atom{maturity, weight}});
}

double DiscreteMeasure::weight_at(double maturity) const {
    for (const auto& a : atoms_) {
        if (same_maturity(a.maturity, maturity)) return a.weight;
    }
    return 0.0;
}

bool DiscreteMeasure::has_atom(double maturity) const {
    return std::any_of(atoms_.begin(), atoms_.end(),
                       [&](const Atom& a) { return same_maturity(a.maturity, maturity); });
}

std::vector<double> DiscreteMeasure::support() const {
    std::vector<double> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.maturity);
    return out;
}

bool DiscreteMeasure::all_weights_positive() const {
    return !atoms_.empty() &&
           std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.weight > 0.0; });
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
    DiscreteMeasure out = *this;
    for (auto& a : out.atoms_) a.weight *= factor;
    return out;
}

DiscreteMeasure DiscreteMeasure::operator+(const DiscreteMeasure& other) const {
    std::vector<Atom> all = atoms_;
    all.insert(all.end(), other.atoms_.begin(), other.atoms_.end());
    return DiscreteMeasure(std::move(all));
}

DiscreteMeasure DiscreteMeasure::operator-(const DiscreteMeasure& other) const {
    return *this + other.scaled(-1.0);
}

// ---------------------------------------------------------------------------
// Curves

Curve::Curve(double t, std::vector<double> maturities, std::vector<double> values)
    : time_(t), maturities_(std::move(maturities)), values_(std::move(values)) {
    if (maturities_.size() != values_.size()) {
        throw std::invalid_argument("curve maturities and values differ in length");
    }
    if (maturities_.empty()) throw std::invalid_argument("curve has no nodes");
    for (std::size_t i = 0; i < maturities_.size(); ++i) {
        if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
            std::ostringstream os;
            os << "curve value at maturity " << maturities_[i] << " must be positive and finite";
            throw std::domain_error(os.str());
        }
        if (i > 0 && !(maturities_[i] - maturities_[i - 1] > kMaturityTolerance)) {
            throw std::invalid_argument("curve maturities must be strictly increasing");
        }
    }
}

std::optional<std::size_t> Curve::find(double maturity) const {
    auto it = std::lower_bound(maturities_.begin(), maturities_.end(), maturity - kMaturityTolerance);
    if (it != maturities_.end() && same_maturity(*it, maturity)) {
        return static_cast<std::size_t>(it - maturities_.begin());
    }
    return std::nullopt;
}

std::size_t Curve::index_of(double maturity) const {
    if (auto i = find(maturity)) return *i;
    throw LookupError(maturity);
}

double Curve::at(double maturity) const { return values_[index_of(maturity)]; }

BondCurve BondCurve::from_points(double t, std::vector<std::pair<double, double>> points) {
    std::sort(points.begin(), points.end());
    std::vector<double> mats, vals;
    for (const auto& [m, v] : points) {
        mats.push_back(m);
        vals.push_back(v);
    }
    return BondCurve(t, std::move(mats), std::move(vals));
}

ForwardCurve::ForwardCurve(double t, DiscreteMeasure numeraire, std::vector<double> maturities,
                           std::vector<double> values)
    : Curve(t, std::move(maturities), std::move(values)), numeraire_(std::move(numeraire)) {
    if (!numeraire_.all_weights_positive()) {
        throw std::domain_error("numeraire measure must have positive weights");
    }
    if (normalization_error() > kNormalizationTolerance) {
        throw std::domain_error("forward curve does not pair to one against its numeraire");
    }
}

double ForwardCurve::normalization_error() const {
    return std::abs(measure_pair(*this, numeraire_) - 1.0);
}

double measure_pair(const Curve& curve, const DiscreteMeasure& m) {
    double sum = 0.0;
    for (const auto& a : m.atoms()) sum += a.weight * curve.at(a.maturity);
    return sum;
}

ForwardCurve forward_normalize(const Curve& curve, const DiscreteMeasure& nu) {
    const double numeraire = measure_pair(curve, nu);
    if (!(numeraire > 0.0)) {
        throw std::domain_error("numeraire value P_t(nu) must be positive");
    }
    std::vector<double> values(curve.values().begin(), curve.values().end());
    for (auto& v : values) v /= numeraire;
    auto mats = std::vector<double>(curve.maturities().begin(), curve.maturities().end());
    return ForwardCurve(curve.time(), nu, std::move(mats), std::move(values));
}

ForwardCurve forward_normalize(const ForwardCurve& curve, const DiscreteMeasure& nu) {
    if (curve.numeraire() == nu) return curve;
    return forward_normalize(static_cast<const Curve&>(curve), nu);
}

double libor_rate(const Curve& curve, double T, double S) {
    if (!(T < S)) throw std::invalid_argument("libor_rate requires T < S");
    const double pt = curve.at(T);
    const double ps = curve.at(S);
    return (pt - ps) / ((S - T) * ps);
}

DiscreteMeasure swap_floating_leg(const TenorStructure& tenor) {
    return DiscreteMeasure({{tenor.first(), 1.0}, {tenor.last(), -1.0}});
}

DiscreteMeasure swap_annuity(const TenorStructure& tenor) {
    std::vector<Atom> atoms;
    const auto tau = tenor.spacings();
    for (std::size_t k = 0; k < tau.size(); ++k) {
        atoms.push_back({tenor.maturities[k + 1], tau[k]});
    }
    return DiscreteMeasure(std::move(atoms));
}

double swap_rate(const Curve& curve, const TenorStructure& tenor) {
    const double annuity = measure_pair(curve, swap_annuity(tenor));
    if (!(annuity > 0.0)) throw std::domain_error("swap annuity must be positive");
    return measure_pair(curve, swap_floating_leg(tenor)) / annuity;
}

std::vector<NodeWeight> resolve_nodes(const DiscreteMeasure& m, std::span<const double> maturities) {
    std::vector<NodeWeight> out;
    out.reserve(m.size());
    for (const auto& a : m.atoms()) {
        auto it = std::lower_bound(maturities.begin(), maturities.end(), a.maturity - kMaturityTolerance);
        if (it == maturities.end() || !same_maturity(*it, a.maturity)) throw LookupError(a.maturity);
        out.push_back({static_cast<std::size_t>(it - maturities.begin()), a.weight});
    }
    return out;
}

double pair_nodes(std::span<const NodeWeight> m, std::span<const double> values) {
    double sum = 0.0;
    for (const auto& nw : m) sum += nw.weight * values[nw.node];
    return sum;
}

std::vector<double> merge_maturities(std::vector<double> maturities) {
    std::sort(maturities.begin(), maturities.end());
    std::vector<double> out;
    for (double m : maturities) {
        if (out.empty() || !same_maturity(out.back(), m)) out.push_back(m);
    }
    return out;
}

}  // namespace curvehedge
