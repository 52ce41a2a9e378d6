#pragma once

#include "curvehedge/market_model.hpp"
#include "curvehedge/rng.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace curvehedge {

/// Sub-points of the midpoint rule used for time integrals of zeta over one step.
inline constexpr int kStepQuadraturePoints = 8;

enum class VolFamily { constant, ho_lee, vasicek, piecewise };

std::string to_string(VolFamily family);
VolFamily parse_vol_family(const std::string& name);

/// Deterministic d-factor bond volatility zeta_t(y).
///
/// Built-in families (per factor f):
///   constant:  zeta_t(y) = c_f
///   ho-lee:    zeta_t(y) = -beta_f (y - t)
///   vasicek:   zeta_t(y) = -(sigma_f / a_f) (1 - exp(-a_f (y - t)))
///   piecewise: zeta_t(y) = level_k for y in (m_{k-1}, m_k], constant in t
class VolSurface {
public:
    using Evaluator = std::function<void(double t, double y, std::span<double> out)>;

    VolSurface(std::size_t factors, VolFamily family, Evaluator eval);

    static VolSurface zero(std::size_t factors = 1);
    static VolSurface constant(std::vector<double> levels);
    static VolSurface ho_lee(std::vector<double> betas);
    static VolSurface vasicek(std::vector<double> sigmas, std::vector<double> speeds);
    static VolSurface piecewise(std::vector<double> maturities, std::vector<std::vector<double>> levels);

    std::size_t factors() const { return factors_; }
    VolFamily family() const { return family_; }

    void eval(double t, double y, std::span<double> out) const { eval_(t, y, out); }
    std::vector<double> operator()(double t, double y) const;

    /// Throws std::domain_error if zeta is non-finite or larger than `bound` in
    /// magnitude anywhere on times x maturities.
    void check_bounded(std::span<const double> times, std::span<const double> maturities,
                       double bound = 1e3) const;

private:
    std::size_t factors_;
    VolFamily family_;
    Evaluator eval_;
};

/// Strictly increasing simulation dates t_0 < ... < t_m.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> times);

    static TimeGrid uniform(double start, double end, std::size_t steps);
    /// Uniform steps on [start, exercise], continued with the same spacing up to
    /// settlement so that exercise is a grid node.
    static TimeGrid through(double start, double exercise, double settlement, std::size_t steps_to_exercise);

    std::span<const double> times() const { return times_; }
    std::size_t steps() const { return times_.size() - 1; }
    double time(std::size_t l) const { return times_[l]; }
    double dt(std::size_t l) const { return times_[l + 1] - times_[l]; }
    double start() const { return times_.front(); }
    double end() const { return times_.back(); }
    /// Index of the node equal to t (within 1e-9); throws std::invalid_argument otherwise.
    std::size_t index_of(double t) const;

private:
    std::vector<double> times_;
};

/// Step-averaged zeta over each grid step and node, computed once per model.
class StepVolTable {
public:
    StepVolTable(const VolSurface& vol, const TimeGrid& grid, std::span<const double> maturities);

    std::span<const double> at(std::size_t step, std::size_t node) const {
        return {data_.data() + (step * nodes_ + node) * factors_, factors_};
    }
    /// 1/2 |zeta_bar|^2 dt for the exact lognormal drift.
    double half_variance(std::size_t step, std::size_t node) const { return half_var_[step * nodes_ + node]; }
    std::size_t factors() const { return factors_; }

private:
    std::size_t nodes_;
    std::size_t factors_;
    std::vector<double> data_;
    std::vector<double> half_var_;
};

enum class PathMeasure { risk_neutral, forward };

/// One simulated trajectory of a curve on a time grid.
///
/// Risk-neutral paths hold discounted bond prices; forward paths hold the
/// numeraire-normalized curve and the forward-measure Brownian increments.
struct CurvePath {
    PathMeasure measure = PathMeasure::forward;
    std::vector<double> times;
    std::vector<double> maturities;
    std::size_t factors = 1;
    std::vector<double> values;      // (steps + 1) x nodes
    std::vector<double> increments;  // steps x factors
    DiscreteMeasure numeraire;       // forward paths only
    std::optional<double> rn_weight;

    std::size_t steps() const { return times.size() - 1; }
    std::size_t nodes() const { return maturities.size(); }
    std::span<const double> state(std::size_t l) const { return {values.data() + l * nodes(), nodes()}; }
    std::span<double> state(std::size_t l) { return {values.data() + l * nodes(), nodes()}; }
    std::span<const double> increment(std::size_t l) const {
        return {increments.data() + l * factors, factors};
    }
    double value(std::size_t l, std::size_t node) const { return values[l * nodes() + node]; }

    BondCurve bond_curve(std::size_t l) const;
    /// Forward-path state at step l; throws std::logic_error on a risk-neutral path.
    ForwardCurve forward_curve(std::size_t l) const;
};

/// Exact lognormal evolution of discounted bond prices under the risk-neutral measure:
/// P~_{l+1}(y) = P~_l(y) exp(zeta_bar . dW - 1/2 |zeta_bar|^2 dt), one d-dimensional
/// noise shared by all maturities.
class DiscountedSimulator {
public:
    DiscountedSimulator(BondCurve curve0, const VolSurface& vol, TimeGrid grid);

    const TimeGrid& grid() const { return grid_; }
    std::size_t nodes() const { return curve0_.size(); }
    std::size_t factors() const { return table_.factors(); }

    void draw_increments(Xoshiro256& rng, std::span<double> out) const;
    void simulate(std::uint64_t path, const SeedSpec& seeds, CurvePath& out) const;
    /// Pathwise map from Brownian increments to the curve trajectory.
    void evolve(std::span<const double> increments, CurvePath& out) const;

private:
    void prepare(CurvePath& out) const;

    BondCurve curve0_;
    TimeGrid grid_;
    StepVolTable table_;
};

/// Log-Euler scheme for the forward curve under the forward measure:
/// P^_{l+1}(y) = P^_l(y) exp(b . dW^ - 1/2 |b|^2 dt), b = sum_k nu_k P^_l(T_k)(zeta(y) - zeta(T_k)),
/// followed by division by sum_k nu_k P^_{l+1}(T_k).
class ForwardEulerSimulator {
public:
    ForwardEulerSimulator(ForwardCurve start, const VolSurface& vol, TimeGrid grid);

    const TimeGrid& grid() const { return grid_; }
    const ForwardCurve& start() const { return start_; }
    std::size_t nodes() const { return start_.size(); }
    std::size_t factors() const { return table_.factors(); }

    void draw_increments(Xoshiro256& rng, std::span<double> out) const;
    void simulate(std::uint64_t path, const SeedSpec& seeds, CurvePath& out) const;
    void evolve(std::span<const double> increments, CurvePath& out) const;
    /// Terminal curve only; `state` receives the values at grid end.
    void terminal(std::span<const double> increments, std::span<double> state) const;

private:
    void step(std::size_t l, std::span<const double> increment, std::span<const double> current,
              std::span<double> next) const;

    ForwardCurve start_;
    TimeGrid grid_;
    StepVolTable table_;
    std::vector<NodeWeight> numeraire_nodes_;
};

std::vector<CurvePath> simulate_discounted_exact(const BondCurve& curve0, const VolSurface& vol,
                                                 const TimeGrid& grid, const SeedSpec& seeds,
                                                 std::size_t n_paths, std::size_t threads = 1);

std::vector<CurvePath> simulate_forward_euler(const ForwardCurve& start, const VolSurface& vol,
                                              const TimeGrid& grid, const SeedSpec& seeds,
                                              std::size_t n_paths, std::size_t threads = 1);

/// Forward-measure density on a risk-neutral path: P~_end(nu) / P~_0(nu).
double rn_weight(const CurvePath& path, const DiscreteMeasure& nu);

/// Density restricted to the information at grid step l: P~_l(nu) / P~_0(nu).
double rn_weight_at(const CurvePath& path, const DiscreteMeasure& nu, std::size_t l);

/// Drift between W and W^: sum_k nu_k P^_t(T_k) zeta_t(T_k).
std::vector<double> girsanov_drift(const ForwardCurve& state, const VolSurface& vol, double t);

/// Sums consecutive groups of `factor` steps of d-dimensional increments.
std::vector<double> aggregate_increments(std::span<const double> fine, std::size_t factors,
                                         std::size_t factor);

}  // namespace curvehedge
