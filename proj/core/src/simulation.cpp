#include "curvehedge/simulation.hpp"

#include "curvehedge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace curvehedge {

std::string to_string(VolFamily family) {
    switch (family) {
        case VolFamily::constant: return "constant";
        case VolFamily::ho_lee: return "ho-lee";
        case VolFamily::vasicek: return "vasicek";
        case VolFamily::piecewise: return "piecewise";
    }
    return "unknown";
}

VolFamily parse_vol_family(const std::string& name) {
    if (name == "constant") return VolFamily::constant;
    if (name == "ho-lee") return VolFamily::ho_lee;
    if (name == "vasicek") return VolFamily::vasicek;
    if (name == "piecewise") return VolFamily::piecewise;
    throw std::invalid_argument("unknown volatility family '" + name + "'");
}

// ---------------------------------------------------------------------------
// VolSurface

VolSurface::VolSurface(std::size_t factors, VolFamily family, Evaluator eval)
    : factors_(factors), family_(family), eval_(std::move(eval)) {
    if (factors_ == 0) throw std::invalid_argument("volatility needs at least one factor");
    if (!eval_) throw std::invalid_argument("volatility evaluator is empty");
}

VolSurface VolSurface::zero(std::size_t factors) { return constant(std::vector<double>(factors, 0.0)); }

VolSurface VolSurface::constant(std::vector<double> levels) {
    const std::size_t d = levels.size();
    return VolSurface(d, VolFamily::constant, [levels = std::move(levels)](double, double, std::span<double> out) {
        std::copy(levels.begin(), levels.end(), out.begin());
    });
}

VolSurface VolSurface::ho_lee(std::vector<double> betas) {
    const std::size_t d = betas.size();
    return VolSurface(d, VolFamily::ho_lee, [betas = std::move(betas)](double t, double y, std::span<double> out) {
        for (std::size_t f = 0; f < betas.size(); ++f) out[f] = -betas[f] * (y - t);
    });
}

VolSurface VolSurface::vasicek(std::vector<double> sigmas, std::vector<double> speeds) {
    if (sigmas.size() != speeds.size()) {
        throw std::invalid_argument("vasicek volatility needs one speed per factor");
    }
    for (double a : speeds) {
        if (!(a > 0.0)) throw std::invalid_argument("vasicek mean-reversion speeds must be positive");
    }
    const std::size_t d = sigmas.size();
    return VolSurface(d, VolFamily::vasicek,
                      [sigmas = std::move(sigmas), speeds = std::move(speeds)](double t, double y, std::span<double> out) {
                          for (std::size_t f = 0; f < sigmas.size(); ++f) {
                              out[f] = -(sigmas[f] / speeds[f]) * (1.0 - std::exp(-speeds[f] * (y - t)));
                          }
                      });
}

VolSurface VolSurface::piecewise(std::vector<double> maturities, std::vector<std::vector<double>> levels) {
    if (maturities.empty() || maturities.size() != levels.size()) {
        throw std::invalid_argument("piecewise volatility needs one level vector per maturity node");
    }
    const std::size_t d = levels.front().size();
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (levels[k].size() != d) throw std::invalid_argument("piecewise levels must share the factor count");
        if (k > 0 && !(maturities[k] > maturities[k - 1])) {
            throw std::invalid_argument("piecewise volatility maturities must be increasing");
        }
    }
    return VolSurface(d, VolFamily::piecewise,
                      [m = std::move(maturities), lv = std::move(levels)](double, double y, std::span<double> out) {
                          auto it = std::lower_bound(m.begin(), m.end(), y - kMaturityTolerance);
                          const std::size_t k = it == m.end() ? m.size() - 1 : static_cast<std::size_t>(it - m.begin());
                          std::copy(lv[k].begin(), lv[k].end(), out.begin());
                      });
}

std::vector<double> VolSurface::operator()(double t, double y) const {
    std::vector<double> out(factors_);
    eval_(t, y, out);
    return out;
}

void VolSurface::check_bounded(std::span<const double> times, std::span<const double> maturities,
                               double bound) const {
    std::vector<double> z(factors_);
    for (double t : times) {
        for (double y : maturities) {
            eval_(t, y, z);
            for (double v : z) {
                if (!std::isfinite(v) || std::abs(v) > bound) {
                    std::ostringstream os;
                    os << "volatility unbounded at t=" << t << ", y=" << y;
                    throw std::domain_error(os.str());
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// TimeGrid

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2) throw std::invalid_argument("time grid needs at least one step");
    for (std::size_t l = 0; l + 1 < times_.size(); ++l) {
        if (!(times_[l + 1] > times_[l])) throw std::invalid_argument("time grid must be strictly increasing");
    }
}

TimeGrid TimeGrid::uniform(double start, double end, std::size_t steps) {
    if (steps == 0) throw std::invalid_argument("time grid needs at least one step");
    std::vector<double> t(steps + 1);
    for (std::size_t l = 0; l <= steps; ++l) {
        t[l] = start + (end - start) * static_cast<double>(l) / static_cast<double>(steps);
    }
    t.back() = end;
    return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::through(double start, double exercise, double settlement, std::size_t steps_to_exercise) {
    TimeGrid head = uniform(start, exercise, steps_to_exercise);
    if (!(settlement > exercise + kMaturityTolerance)) return head;
    const double dt = head.dt(0);
    const auto extra = static_cast<std::size_t>(std::ceil((settlement - exercise) / dt - 1e-9));
    TimeGrid tail = uniform(exercise, settlement, std::max<std::size_t>(extra, 1));
    std::vector<double> t(head.times_.begin(), head.times_.end());
    t.insert(t.end(), tail.times_.begin() + 1, tail.times_.end());
    return TimeGrid(std::move(t));
}

std::size_t TimeGrid::index_of(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - kMaturityTolerance);
    if (it == times_.end() || std::abs(*it - t) > kMaturityTolerance) {
        std::ostringstream os;
        os << "time " << t << " is not a grid node";
        throw std::invalid_argument(os.str());
    }
    return static_cast<std::size_t>(it - times_.begin());
}

// ---------------------------------------------------------------------------
// StepVolTable

StepVolTable::StepVolTable(const VolSurface& vol, const TimeGrid& grid, std::span<const double> maturities)
    : nodes_(maturities.size()), factors_(vol.factors()) {
    const std::size_t steps = grid.steps();
    data_.assign(steps * nodes_ * factors_, 0.0);
    half_var_.assign(steps * nodes_, 0.0);
    std::vector<double> z(factors_);
    for (std::size_t l = 0; l < steps; ++l) {
        const double t0 = grid.time(l);
        const double h = grid.dt(l) / kStepQuadraturePoints;
        for (std::size_t i = 0; i < nodes_; ++i) {
            double* cell = data_.data() + (l * nodes_ + i) * factors_;
            for (int q = 0; q < kStepQuadraturePoints; ++q) {
                vol.eval(t0 + (q + 0.5) * h, maturities[i], z);
                for (std::size_t f = 0; f < factors_; ++f) cell[f] += z[f];
            }
            double sq = 0.0;
            for (std::size_t f = 0; f < factors_; ++f) {
                cell[f] /= kStepQuadraturePoints;
                sq += cell[f] * cell[f];
            }
            half_var_[l * nodes_ + i] = 0.5 * sq * grid.dt(l);
        }
    }
    for (double v : data_) {
        if (!std::isfinite(v)) throw std::domain_error("volatility is not finite on the simulation grid");
    }
}

// ---------------------------------------------------------------------------
// CurvePath

BondCurve CurvePath::bond_curve(std::size_t l) const {
    auto s = state(l);
    return BondCurve(times[l], maturities, std::vector<double>(s.begin(), s.end()));
}

ForwardCurve CurvePath::forward_curve(std::size_t l) const {
    if (measure != PathMeasure::forward) throw std::logic_error("forward_curve requires a forward-measure path");
    auto s = state(l);
    return ForwardCurve(times[l], numeraire, maturities, std::vector<double>(s.begin(), s.end()));
}

namespace {

void check_start(double curve_time, const TimeGrid& grid) {
    if (std::abs(curve_time - grid.start()) > kMaturityTolerance) {
        throw std::invalid_argument("simulation grid must start at the initial curve's time");
    }
}

void fill_normals(Xoshiro256& rng, const TimeGrid& grid, std::size_t factors, std::span<double> out) {
    std::normal_distribution<double> normal;
    for (std::size_t l = 0; l < grid.steps(); ++l) {
        const double sd = std::sqrt(grid.dt(l));
        for (std::size_t f = 0; f < factors; ++f) out[l * factors + f] = sd * normal(rng);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscountedSimulator

DiscountedSimulator::DiscountedSimulator(BondCurve curve0, const VolSurface& vol, TimeGrid grid)
    : curve0_(std::move(curve0)), grid_(std::move(grid)), table_(vol, grid_, curve0_.maturities()) {
    check_start(curve0_.time(), grid_);
}

void DiscountedSimulator::draw_increments(Xoshiro256& rng, std::span<double> out) const {
    fill_normals(rng, grid_, factors(), out);
}

void DiscountedSimulator::prepare(CurvePath& out) const {
    out.measure = PathMeasure::risk_neutral;
    out.times.assign(grid_.times().begin(), grid_.times().end());
    out.maturities.assign(curve0_.maturities().begin(), curve0_.maturities().end());
    out.factors = factors();
    out.values.resize((grid_.steps() + 1) * nodes());
    out.increments.resize(grid_.steps() * factors());
    out.numeraire = DiscreteMeasure();
    out.rn_weight.reset();
}

void DiscountedSimulator::simulate(std::uint64_t path, const SeedSpec& seeds, CurvePath& out) const {
    prepare(out);
    auto rng = seeds.stream(path);
    draw_increments(rng, out.increments);
    evolve(std::span<const double>(out.increments), out);
}

void DiscountedSimulator::evolve(std::span<const double> increments, CurvePath& out) const {
    if (increments.size() != grid_.steps() * factors()) {
        throw std::invalid_argument("increment count does not match grid and factor count");
    }
    if (out.increments.data() != increments.data()) {
        prepare(out);
        std::copy(increments.begin(), increments.end(), out.increments.begin());
    }
    const std::size_t n = nodes();
    const std::size_t d = factors();
    std::copy(curve0_.values().begin(), curve0_.values().end(), out.values.begin());
    for (std::size_t l = 0; l < grid_.steps(); ++l) {
        const double* dw = increments.data() + l * d;
        const double* cur = out.values.data() + l * n;
        double* next = out.values.data() + (l + 1) * n;
        for (std::size_t i = 0; i < n; ++i) {
            const auto z = table_.at(l, i);
            double dot = 0.0;
            for (std::size_t f = 0; f < d; ++f) dot += z[f] * dw[f];
            next[i] = cur[i] * std::exp(dot - table_.half_variance(l, i));
        }
    }
}

// ---------------------------------------------------------------------------
// ForwardEulerSimulator

ForwardEulerSimulator::ForwardEulerSimulator(ForwardCurve start, const VolSurface& vol, TimeGrid grid)
    : start_(std::move(start)),
      grid_(std::move(grid)),
      table_(vol, grid_, start_.maturities()),
      numeraire_nodes_(resolve_nodes(start_.numeraire(), start_.maturities())) {
    check_start(start_.time(), grid_);
}

void ForwardEulerSimulator::draw_increments(Xoshiro256& rng, std::span<double> out) const {
    fill_normals(rng, grid_, factors(), out);
}

void ForwardEulerSimulator::simulate(std::uint64_t path, const SeedSpec& seeds, CurvePath& out) const {
    out.increments.resize(grid_.steps() * factors());
    auto rng = seeds.stream(path);
    draw_increments(rng, out.increments);
    evolve(std::span<const double>(out.increments), out);
}

void ForwardEulerSimulator::step(std::size_t l, std::span<const double> dw, std::span<const double> cur,
                                 std::span<double> next) const {
    const std::size_t n = nodes();
    const std::size_t d = factors();
    const double dt = grid_.dt(l);
    const double* zeta = table_.at(l, 0).data();  // node-major, d values per node
    const double* in = cur.data();
    double* out = next.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double* zi = zeta + i * d;
        double dot = 0.0;
        double sq = 0.0;
        for (std::size_t f = 0; f < d; ++f) {
            double b = 0.0;
            for (const auto& nw : numeraire_nodes_) {
                b += nw.weight * in[nw.node] * (zi[f] - zeta[nw.node * d + f]);
            }
            dot += b * dw[f];
            sq += b * b;
        }
        out[i] = in[i] * std::exp(dot - 0.5 * sq * dt);
    }
    double norm = 0.0;
    for (const auto& nw : numeraire_nodes_) norm += nw.weight * out[nw.node];
    const double inv = 1.0 / norm;
    for (std::size_t i = 0; i < n; ++i) out[i] *= inv;
}

void ForwardEulerSimulator::evolve(std::span<const double> increments, CurvePath& out) const {
    if (increments.size() != grid_.steps() * factors()) {
        throw std::invalid_argument("increment count does not match grid and factor count");
    }
    out.measure = PathMeasure::forward;
    out.times.assign(grid_.times().begin(), grid_.times().end());
    out.maturities.assign(start_.maturities().begin(), start_.maturities().end());
    out.factors = factors();
    out.numeraire = start_.numeraire();
    out.rn_weight.reset();
    out.values.resize((grid_.steps() + 1) * nodes());
    if (out.increments.data() != increments.data()) out.increments.assign(increments.begin(), increments.end());
    std::copy(start_.values().begin(), start_.values().end(), out.values.begin());
    const std::size_t d = factors();
    for (std::size_t l = 0; l < grid_.steps(); ++l) {
        step(l, increments.subspan(l * d, d), out.state(l), out.state(l + 1));
    }
}

void ForwardEulerSimulator::terminal(std::span<const double> increments, std::span<double> state) const {
    const std::size_t d = factors();
    if (grid_.steps() == 1) {
        step(0, increments, start_.values(), state);
        return;
    }
    thread_local std::vector<double> scratch;
    scratch.resize(nodes());
    std::copy(start_.values().begin(), start_.values().end(), state.begin());
    for (std::size_t l = 0; l < grid_.steps(); ++l) {
        step(l, increments.subspan(l * d, d), state, scratch);
        std::copy(scratch.begin(), scratch.end(), state.begin());
    }
}

// ---------------------------------------------------------------------------
// Free functions

namespace {

template <class Simulator>
std::vector<CurvePath> simulate_many(const Simulator& sim, const SeedSpec& seeds, std::size_t n_paths,
                                     std::size_t threads) {
    if (n_paths == 0) throw std::invalid_argument("number of paths must be positive");
    std::vector<CurvePath> paths(n_paths);
    parallel_blocks(n_paths, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) sim.simulate(p, seeds, paths[p]);
    });
    return paths;
}

}  // namespace

std::vector<CurvePath> simulate_discounted_exact(const BondCurve& curve0, const VolSurface& vol,
                                                 const TimeGrid& grid, const SeedSpec& seeds,
                                                 std::size_t n_paths, std::size_t threads) {
    return simulate_many(DiscountedSimulator(curve0, vol, grid), seeds, n_paths, threads);
}

std::vector<CurvePath> simulate_forward_euler(const ForwardCurve& start, const VolSurface& vol,
                                              const TimeGrid& grid, const SeedSpec& seeds,
                                              std::size_t n_paths, std::size_t threads) {
    return simulate_many(ForwardEulerSimulator(start, vol, grid), seeds, n_paths, threads);
}

double rn_weight_at(const CurvePath& path, const DiscreteMeasure& nu, std::size_t l) {
    if (path.measure != PathMeasure::risk_neutral) {
        throw std::invalid_argument("rn_weight needs a risk-neutral (discounted) path");
    }
    const auto nodes = resolve_nodes(nu, path.maturities);
    const double initial = pair_nodes(nodes, path.state(0));
    if (!(initial > 0.0)) throw std::domain_error("initial numeraire value P~_0(nu) must be positive");
    return pair_nodes(nodes, path.state(l)) / initial;
}

double rn_weight(const CurvePath& path, const DiscreteMeasure& nu) { return rn_weight_at(path, nu, path.steps()); }

std::vector<double> girsanov_drift(const ForwardCurve& state, const VolSurface& vol, double t) {
    std::vector<double> drift(vol.factors(), 0.0);
    std::vector<double> z(vol.factors());
    for (const auto& a : state.numeraire().atoms()) {
        vol.eval(t, a.maturity, z);
        const double w = a.weight * state.at(a.maturity);
        for (std::size_t f = 0; f < z.size(); ++f) drift[f] += w * z[f];
    }
    return drift;
}

std::vector<double> aggregate_increments(std::span<const double> fine, std::size_t factors, std::size_t factor) {
    if (factor == 0 || factors == 0 || fine.size() % (factors * factor) != 0) {
        throw std::invalid_argument("increments cannot be aggregated by the requested factor");
    }
    const std::size_t coarse_steps = fine.size() / (factors * factor);
    std::vector<double> out(coarse_steps * factors, 0.0);
    for (std::size_t c = 0; c < coarse_steps; ++c) {
        for (std::size_t k = 0; k < factor; ++k) {
            for (std::size_t f = 0; f < factors; ++f) {
                out[c * factors + f] += fine[(c * factor + k) * factors + f];
            }
        }
    }
    return out;
}

}  // namespace curvehedge
