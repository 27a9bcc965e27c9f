#pragma once

#include "entangle.hpp"
#include "gibbs.hpp"
#include "linalg.hpp"
#include "spin_model.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace spinlab {

// ---- observables and parameters ----------------------------------------------

enum class Observable { C12, C13, EnergyGap, Purity, GroundDegeneracy };

inline std::string_view to_string(Observable o) {
    switch (o) {
    case Observable::C12: return "c12";
    case Observable::C13: return "c13";
    case Observable::EnergyGap: return "energy_gap";
    case Observable::Purity: return "purity";
    case Observable::GroundDegeneracy: return "ground_degeneracy";
    }
    return "?";
}

inline Observable parse_observable(std::string_view s) {
    for (auto o : {Observable::C12, Observable::C13, Observable::EnergyGap, Observable::Purity,
                   Observable::GroundDegeneracy})
        if (s == to_string(o))
            return o;
    throw ContractError("unknown observable '" + std::string(s) +
                        "' (expected c12, c13, energy_gap, purity, ground_degeneracy)");
}

inline bool is_axis_name(std::string_view s) { return s == "delta" || s == "d" || s == "t" || s == "h"; }

/// A model plus a temperature: one point of any sweep.
struct StatePoint {
    ModelSpec model;
    double t = 0.0;
};

inline void set_parameter(StatePoint& p, std::string_view name, double v) {
    if (name == "delta") p.model.delta = v;
    else if (name == "d") p.model.d = v;
    else if (name == "h") p.model.h = v;
    else if (name == "t") p.t = v;
    else throw ContractError("unknown sweep parameter '" + std::string(name) + "' (expected delta, d, t, h)");
}

inline double get_parameter(const StatePoint& p, std::string_view name) {
    if (name == "delta") return p.model.delta;
    if (name == "d") return p.model.d;
    if (name == "h") return p.model.h;
    if (name == "t") return p.t;
    throw ContractError("unknown sweep parameter '" + std::string(name) + "'");
}

// ---- single-point evaluation -----------------------------------------------

/// Computes the requested observables for one model at temperature t.
class PointEvaluator {
  public:
    PointEvaluator(const ModelSpec& model, double t) : t_(t) {
        if (!(t >= 0.0) || !std::isfinite(t))
            throw ContractError("temperature must be finite and >= 0");
        spectrum_ = hermitian_eig(build_hamiltonian(model));
        rho_ = thermal_state(spectrum_, t_);
        n_ = model.n;
    }

    const HermitianSpectrum& spectrum() const { return spectrum_; }
    const DensityMatrix& state() const { return *rho_; }

    double concurrence(int i, int j) const { return pairwise_concurrence(*rho_, i, j).value; }

    double value(Observable o) const {
        switch (o) {
        case Observable::C12: return concurrence(1, 2);
        case Observable::C13:
            if (n_ < 3)
                throw ContractError("c13 requires n >= 3");
            return concurrence(1, 3);
        case Observable::EnergyGap: {
            const std::size_t deg = ground_degeneracy(spectrum_.eigenvalues);
            if (deg == spectrum_.eigenvalues.size())
                return 0.0;
            return spectrum_.eigenvalues[deg] - spectrum_.eigenvalues.front();
        }
        case Observable::Purity: return rho_->purity();
        case Observable::GroundDegeneracy: return static_cast<double>(ground_degeneracy(spectrum_.eigenvalues));
        }
        return 0.0;
    }

  private:
    double t_ = 0.0;
    int n_ = 0;
    HermitianSpectrum spectrum_;
    std::optional<DensityMatrix> rho_;
};

// ---- sweep grids -----------------------------------------------------------

struct SweepAxis {
    std::string name;
    std::vector<double> values;

    /// `points` evenly spaced values from min to max inclusive; a single point
    /// requires min == max.
    static SweepAxis range(std::string name, double min, double max, std::size_t points) {
        if (!std::isfinite(min) || !std::isfinite(max))
            throw ContractError("axis " + name + ": range must be finite");
        if (points == 0)
            throw ContractError("axis " + name + ": points must be >= 1");
        if (points == 1 && min != max)
            throw ContractError("axis " + name + ": a single point needs min == max");
        if (max < min)
            throw ContractError("axis " + name + ": max < min");
        SweepAxis a{std::move(name), std::vector<double>(points)};
        for (std::size_t k = 0; k < points; ++k)
            a.values[k] = points == 1 ? min
                                      : (k + 1 == points ? max
                                                         : min + (max - min) * static_cast<double>(k) /
                                                                     static_cast<double>(points - 1));
        return a;
    }

    static SweepAxis list(std::string name, std::vector<double> values) {
        if (values.empty())
            throw ContractError("axis " + name + ": value list is empty");
        for (double v : values)
            if (!std::isfinite(v))
                throw ContractError("axis " + name + ": values must be finite");
        return {std::move(name), std::move(values)};
    }
};

inline constexpr std::size_t kMaxSweepPoints = 10'000'000;

struct SweepGrid {
    std::vector<SweepAxis> axes; // 1 or 2; the first axis varies slowest
    StatePoint fixed;            // values for everything not on an axis
    std::vector<Observable> observables{Observable::C12};

    std::size_t size() const {
        std::size_t s = 1;
        for (const auto& a : axes)
            s *= a.values.size();
        return s;
    }

    void validate() const {
        if (axes.empty() || axes.size() > 2)
            throw ContractError("sweep grid needs 1 or 2 axes");
        for (const auto& a : axes) {
            if (!is_axis_name(a.name))
                throw ContractError("unknown axis '" + a.name + "' (expected delta, d, t, h)");
            if (a.values.empty())
                throw ContractError("axis " + a.name + " has no points");
        }
        if (axes.size() == 2 && axes[0].name == axes[1].name)
            throw ContractError("axis names must be distinct");
        if (observables.empty())
            throw ContractError("sweep grid needs at least one observable");
        std::size_t total = 1;
        for (const auto& a : axes) {
            if (a.values.size() > kMaxSweepPoints / total)
                throw ContractError("sweep grid exceeds " + std::to_string(kMaxSweepPoints) + " points");
            total *= a.values.size();
        }
    }

    /// Parameters of row `index` in row-major order.
    StatePoint point(std::size_t index) const {
        StatePoint p = fixed;
        std::size_t stride = size();
        for (const auto& a : axes) {
            stride /= a.values.size();
            set_parameter(p, a.name, a.values[(index / stride) % a.values.size()]);
        }
        return p;
    }
};

// ---- tables and serialization ------------------------------------------------

/// Formats a double: shortest round-trip form, or fixed with `precision`
/// decimals when given.
inline std::string format_value(double v, std::optional<int> precision = std::nullopt) {
    if (!precision)
        return format_double(v);
    std::array<char, 512> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, *precision);
    if (ec != std::errc{})
        throw ContractError("format_value: conversion failed");
    return std::string(buf.data(), ptr);
}

struct SweepTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Header row then one line per row, comma separated, LF endings.
    std::string to_csv(std::optional<int> precision = std::nullopt) const {
        std::string out;
        for (std::size_t c = 0; c < header.size(); ++c)
            out += (c ? "," : "") + header[c];
        out += '\n';
        for (const auto& r : rows) {
            for (std::size_t c = 0; c < r.size(); ++c) {
                if (c)
                    out += ',';
                out += format_value(r[c], precision);
            }
            out += '\n';
        }
        return out;
    }

    /// Array of row objects keyed by column name.
    std::string to_json(std::optional<int> precision = std::nullopt) const {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : rows) {
            nlohmann::ordered_json obj = nlohmann::ordered_json::object();
            for (std::size_t c = 0; c < r.size(); ++c)
                obj[header[c]] = precision ? parse_double(format_value(r[c], precision), header[c]) : r[c];
            arr.push_back(std::move(obj));
        }
        return arr.dump(2) + "\n";
    }
};

/// Raised when a sweep point fails numerically; carries the coordinates of
/// the first failing row. Invalid points raise ContractError instead.
class SweepError : public NumericError {
  public:
    SweepError(std::size_t row, std::string coordinates, const std::string& cause)
        : NumericError("sweep failed at row " + std::to_string(row) + " (" + coordinates + "): " + cause),
          row_(row), coordinates_(std::move(coordinates)) {}

    std::size_t row() const { return row_; }
    const std::string& coordinates() const { return coordinates_; }

  private:
    std::size_t row_;
    std::string coordinates_;
};

inline unsigned resolve_threads(unsigned requested) {
    if (requested == 0)
        requested = std::max(1U, std::thread::hardware_concurrency());
    return requested;
}

/// Evaluates every grid point. Rows are independent and written to fixed
/// slots, so the table is identical for any thread count.
inline SweepTable run_sweep(const SweepGrid& grid, unsigned threads = 1) {
    grid.validate();
    const std::size_t total = grid.size();
    SweepTable table;
    for (const auto& a : grid.axes)
        table.header.push_back(a.name);
    for (auto o : grid.observables)
        table.header.emplace_back(to_string(o));
    table.rows.assign(total, {});

    std::vector<std::string> errors(total);
    std::vector<char> contract(total, 0);
    std::atomic<std::size_t> next{0};
    // Rows are handed out in increasing order, so once a row fails only the
    // rows before it still matter; the reported row is the lowest failing one.
    std::atomic<std::size_t> first_failure{total};
    auto record_failure = [&](std::size_t i) {
        std::size_t cur = first_failure.load();
        while (i < cur && !first_failure.compare_exchange_weak(cur, i)) {
        }
    };
    auto work = [&] {
        for (std::size_t i = next++; i < total && i < first_failure.load(); i = next++) {
            const StatePoint p = grid.point(i);
            std::vector<double> row;
            row.reserve(grid.axes.size() + grid.observables.size());
            for (const auto& a : grid.axes)
                row.push_back(get_parameter(p, a.name));
            try {
                const PointEvaluator eval(p.model, p.t);
                for (auto o : grid.observables)
                    row.push_back(eval.value(o));
            } catch (const ContractError& e) {
                errors[i] = e.what();
                contract[i] = 1;
                record_failure(i);
                continue;
            } catch (const std::exception& e) {
                errors[i] = e.what();
                record_failure(i);
                continue;
            }
            table.rows[i] = std::move(row);
        }
    };

    const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), total));
    if (nthreads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < nthreads; ++k)
            pool.emplace_back(work);
    }

    for (std::size_t i = 0; i < total; ++i)
        if (!errors[i].empty()) {
            const StatePoint p = grid.point(i);
            std::string coords;
            for (const auto& a : grid.axes)
                coords += (coords.empty() ? "" : ", ") + a.name + "=" + format_double(get_parameter(p, a.name));
            if (contract[i])
                throw ContractError("invalid sweep point at row " + std::to_string(i) + " (" + coords + "): " +
                                    errors[i]);
            throw SweepError(i, coords, errors[i]);
        }
    return table;
}

// ---- critical temperature ------------------------------------------------------

inline constexpr double kLowestTemperature = 1e-6;

/// Temperature above which the concurrence of `pair` vanishes for good.
///
/// Samples 64 log-spaced temperatures on [1e-6, t_hi], takes the highest
/// positive-to-zero transition and bisects it to 1e-8. Using the highest
/// transition also catches re-entrant windows where C(0) = 0. Returns nullopt
/// when no sample is entangled. If C(t_hi) > 0, t_hi is doubled until the
/// concurrence vanishes.
inline std::optional<double> critical_temperature(const ModelSpec& spec, std::pair<int, int> pair, double t_hi) {
    if (!(t_hi > kLowestTemperature) || !std::isfinite(t_hi))
        throw ContractError("critical_temperature: t_hi must be finite and > 1e-6");
    const auto spectrum = hermitian_eig(build_hamiltonian(spec));
    auto conc = [&](double t) {
        return pairwise_concurrence(thermal_state(spectrum, t), pair.first, pair.second).value;
    };

    for (int widen = 0; conc(t_hi) > 0.0; ++widen) {
        if (widen == 40)
            throw NumericError("critical_temperature: concurrence does not vanish up to t=" + format_double(t_hi));
        t_hi *= 2.0;
    }

    constexpr int kSamples = 64;
    std::vector<double> ts(kSamples);
    const double lmin = std::log(kLowestTemperature);
    const double lmax = std::log(t_hi);
    for (int k = 0; k < kSamples; ++k)
        ts[k] = k + 1 == kSamples ? t_hi : std::exp(lmin + (lmax - lmin) * k / (kSamples - 1));

    int highest = -1;
    for (int k = kSamples - 1; k >= 0; --k)
        if (conc(ts[k]) > 0.0) {
            highest = k;
            break;
        }
    if (highest < 0)
        return std::nullopt;

    double lo = ts[highest];     // entangled
    double hi = ts[highest + 1]; // not entangled
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        (conc(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---- level crossings -------------------------------------------------------

// Which end of the spectrum to follow. Top tracks the ground manifold of -H.
// Auto follows the ground edge, or the top edge when the ground manifold does
// not change anywhere in the range.
enum class SpectralEdge { Auto, Ground, Top };

inline std::string_view to_string(SpectralEdge e) {
    switch (e) {
    case SpectralEdge::Auto: return "auto";
    case SpectralEdge::Ground: return "ground";
    case SpectralEdge::Top: return "top";
    }
    return "?";
}

inline SpectralEdge parse_spectral_edge(std::string_view s) {
    if (s == "auto") return SpectralEdge::Auto;
    if (s == "ground") return SpectralEdge::Ground;
    if (s == "top") return SpectralEdge::Top;
    throw ContractError("unknown edge '" + std::string(s) + "' (expected auto, ground or top)");
}

struct LevelCrossing {
    double value = 0.0;
    std::size_t degeneracy_below = 0; // at the scan point just below
    std::size_t degeneracy_at = 0;
    std::size_t degeneracy_above = 0; // at the scan point just above
};

namespace detail {

// Edge manifold of H resolved by total-magnetization sector.
struct EdgeSignature {
    std::vector<double> sector_min;    // lowest level per sector (of -H for Top)
    std::vector<std::size_t> in_edge;  // levels per sector inside the edge manifold
    std::size_t degeneracy = 0;

    bool same_manifold(const EdgeSignature& o) const { return in_edge == o.in_edge; }
};

inline EdgeSignature edge_signature(const ModelSpec& spec, SpectralEdge edge, double tol) {
    ComplexMatrix h = build_hamiltonian(spec);
    if (edge == SpectralEdge::Top)
        h *= -1.0;
    const std::size_t dim = h.rows();

    // Group basis states by popcount when H conserves it, else one sector.
    bool conserves = true;
    for (std::size_t r = 0; r < dim && conserves; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            if (h(r, c) != cplx{} && std::popcount(r) != std::popcount(c)) {
                conserves = false;
                break;
            }
    const int n = spec.n;
    std::vector<std::vector<std::size_t>> sectors(conserves ? n + 1 : 1);
    for (std::size_t b = 0; b < dim; ++b)
        sectors[conserves ? std::popcount(b) : 0].push_back(b);

    std::vector<std::vector<double>> levels;
    for (const auto& idx : sectors) {
        ComplexMatrix block(idx.size(), idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j)
                block(i, j) = h(idx[i], idx[j]);
        levels.push_back(hermitian_eig(block).eigenvalues);
    }
    double e0 = levels.front().front();
    for (const auto& l : levels)
        e0 = std::min(e0, l.front());
    const double window = tol * (1.0 + std::abs(e0));

    EdgeSignature sig;
    for (const auto& l : levels) {
        sig.sector_min.push_back(l.front());
        std::size_t k = 0;
        while (k < l.size() && l[k] - e0 <= window)
            ++k;
        sig.in_edge.push_back(k);
        sig.degeneracy += k;
    }
    return sig;
}

inline constexpr std::size_t kCrossingScanPoints = 256;

inline std::vector<LevelCrossing> edge_crossings(const ModelSpec& family, std::string_view free_parameter, double lo,
                                                 double hi, double tol, SpectralEdge edge, double degeneracy_tol) {
    auto at = [&](double v) {
        StatePoint p{family, 0.0};
        set_parameter(p, free_parameter, v);
        return edge_signature(p.model, edge, degeneracy_tol);
    };

    const std::size_t m = kCrossingScanPoints;
    std::vector<double> xs(m);
    std::vector<EdgeSignature> sigs;
    sigs.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        xs[k] = k + 1 == m ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(m - 1);
        sigs.push_back(at(xs[k]));
    }

    std::vector<LevelCrossing> out;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const auto& left = sigs[k];
        const auto& right = sigs[k + 1];
        if (left.same_manifold(right))
            continue;

        // A crossing exactly on a scan point shows up in both neighbouring
        // intervals; report it once, at the point itself.
        if (k > 0 && !out.empty() && !left.same_manifold(sigs[k - 1]) && left.degeneracy > right.degeneracy &&
            left.degeneracy > sigs[k - 1].degeneracy) {
            out.back() = {xs[k], sigs[k - 1].degeneracy, left.degeneracy, right.degeneracy};
            continue;
        }

        std::optional<std::size_t> leaving, entering;
        for (std::size_t s = 0; s < left.in_edge.size(); ++s) {
            if (left.in_edge[s] > 0 && right.in_edge[s] == 0 && !leaving)
                leaving = s;
            if (right.in_edge[s] > 0 && left.in_edge[s] == 0 && !entering)
                entering = s;
        }

        double a = xs[k], b = xs[k + 1];
        while (b - a > tol) {
            const double mid = 0.5 * (a + b);
            const auto sm = at(mid);
            bool left_side;
            if (leaving && entering)
                left_side = sm.sector_min[*leaving] < sm.sector_min[*entering];
            else
                left_side = sm.same_manifold(left);
            (left_side ? a : b) = mid;
        }
        const double x = 0.5 * (a + b);
        LevelCrossing c{x, left.degeneracy, at(x).degeneracy, right.degeneracy};
        if (!out.empty() && x - out.back().value < 10.0 * tol) {
            out.back().degeneracy_above = c.degeneracy_above;
            out.back().degeneracy_at = std::max(out.back().degeneracy_at, c.degeneracy_at);
            continue;
        }
        out.push_back(c);
    }
    return out;
}

} // namespace detail

/// Parameter values in [lo, hi] where the edge manifold changes.
///
/// Scans 256 points, labelling each by how many edge levels sit in each
/// magnetization sector. Where the label changes between neighbours and one
/// sector leaves the edge while another enters, the sign change of their
/// energy difference is bisected to `tol`; other label changes are bisected on
/// the label itself. Crossings closer than 10 tol are merged. See SpectralEdge
/// for the choice of edge.
inline std::vector<LevelCrossing> level_crossings(const ModelSpec& family, std::string_view free_parameter, double lo,
                                                  double hi, double tol = 1e-10,
                                                  SpectralEdge edge = SpectralEdge::Auto,
                                                  double degeneracy_tol = kDefaultDegeneracyTol) {
    if (free_parameter != "delta" && free_parameter != "d" && free_parameter != "h")
        throw ContractError("level_crossings: free parameter must be delta, d or h");
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
        throw ContractError("level_crossings: range must be finite with lo < hi");
    if (!(tol > 0.0))
        throw ContractError("level_crossings: tol must be > 0");

    if (edge != SpectralEdge::Auto)
        return detail::edge_crossings(family, free_parameter, lo, hi, tol, edge, degeneracy_tol);
    auto out = detail::edge_crossings(family, free_parameter, lo, hi, tol, SpectralEdge::Ground, degeneracy_tol);
    if (out.empty())
        out = detail::edge_crossings(family, free_parameter, lo, hi, tol, SpectralEdge::Top, degeneracy_tol);
    return out;
}

// ---- figure presets ------------------------------------------------------------

inline const std::vector<double>& default_temperatures() {
    static const std::vector<double> ts{0.0, 0.1, 0.5, 1.0};
    return ts;
}

inline std::vector<std::string_view> figure_ids() {
    return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig8a", "fig8b", "fig8c"};
}

/// Sweep for one of the reference concurrence plots: a parameter axis
/// times the temperature family {0, 0.1, 0.5, 1.0}, observable c12.
///
///   fig1  xxz-dm, vs delta in [-4, 4], D = 0
///   fig2  xxz-dm, vs delta in [-4, 4], D = 2
///   fig3  xxz-dm, vs D in [0, 3], delta = -1.5   (fig4: -0.5, fig5: 0.5, fig6: 1.5)
///   fig7  ising-dm-field, J = 1, vs D in [0, 4], h = 2
///   fig8a ising-dm-field, J = 1, vs h in [0, 5], D = 2
///   fig8b ising-dm-field, J = -1, vs D in [0, 5], h = 2   (fig8 is an alias)
///   fig8c ising-dm-field, J = -1, vs h in [0, 5], D = 2
inline SweepGrid figure_preset(std::string_view id, std::size_t points = 101,
                               std::vector<double> temperatures = default_temperatures()) {
    SweepGrid g;
    g.observables = {Observable::C12};
    ModelSpec& m = g.fixed.model;
    auto xxz_vs_d = [&](double delta) {
        m.kind = ModelKind::XxzDm;
        m.delta = delta;
        g.axes.push_back(SweepAxis::range("d", 0.0, 3.0, points));
    };
    auto idm = [&](double j, std::string axis, double max, double fixed_value) {
        m.kind = ModelKind::IsingDmField;
        m.j = j;
        if (axis == "d")
            m.h = fixed_value;
        else
            m.d = fixed_value;
        g.axes.push_back(SweepAxis::range(std::move(axis), 0.0, max, points));
    };

    if (id == "fig1" || id == "fig2") {
        m.kind = ModelKind::XxzDm;
        m.d = id == "fig1" ? 0.0 : 2.0;
        g.axes.push_back(SweepAxis::range("delta", -4.0, 4.0, points));
    } else if (id == "fig3") xxz_vs_d(-1.5);
    else if (id == "fig4") xxz_vs_d(-0.5);
    else if (id == "fig5") xxz_vs_d(0.5);
    else if (id == "fig6") xxz_vs_d(1.5);
    else if (id == "fig7") idm(1.0, "d", 4.0, 2.0);
    else if (id == "fig8a") idm(1.0, "h", 5.0, 2.0);
    else if (id == "fig8" || id == "fig8b") idm(-1.0, "d", 5.0, 2.0);
    else if (id == "fig8c") idm(-1.0, "h", 5.0, 2.0);
    else
        throw ContractError("unknown figure id '" + std::string(id) + "'");

    g.axes.push_back(SweepAxis::list("t", std::move(temperatures)));
    return g;
}

} // namespace spinlab
