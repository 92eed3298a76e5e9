#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace levydiff {

/// Multi-index / lattice offset. Components beyond the active dimension are zero.
using Offset = std::array<int, 3>;
using Point = std::array<double, 3>;

inline Offset negate(const Offset& o) { return {-o[0], -o[1], -o[2]}; }

/// Uniform periodic grid on the torus [0, L)^N with L = M*h.
/// Grid points sit at x_beta = h*beta; cell beta is the box [h*beta, h*(beta+1))^N.
struct Grid {
    int dim = 1;        // N in {1,2,3}
    int cells = 2;      // M cells per axis
    double spacing = 1; // h

    Grid() = default;
    Grid(int N, int M, double h) : dim(N), cells(M), spacing(h) {
        if (N < 1 || N > 3) throw std::invalid_argument("grid: dimension must be 1, 2 or 3");
        if (M < 2) throw std::invalid_argument("grid: cells per axis must be >= 2");
        if (!(h > 0.0)) throw std::invalid_argument("grid: spacing must be positive");
    }

    double period() const { return cells * spacing; }
    double cell_volume() const { return std::pow(spacing, dim); }
    std::size_t total_cells() const {
        std::size_t n = 1;
        for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(cells);
        return n;
    }

    // Lexicographic linearization, index_0 major.
    std::size_t linear_index(const Offset& idx) const {
        std::size_t lin = 0;
        for (int d = 0; d < dim; ++d) lin = lin * cells + static_cast<std::size_t>(idx[d]);
        return lin;
    }
    Offset multi_index(std::size_t lin) const {
        Offset idx{0, 0, 0};
        for (int d = dim - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(lin % cells);
            lin /= cells;
        }
        return idx;
    }
    Point point(const Offset& idx) const {
        Point x{0, 0, 0};
        for (int d = 0; d < dim; ++d) x[d] = spacing * idx[d];
        return x;
    }
    int wrap(int i) const {
        int r = i % cells;
        return r < 0 ? r + cells : r;
    }

    bool operator==(const Grid&) const = default;
};

/// Real values on a periodic grid, one value per cell.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(const Grid& g, double fill = 0.0)
        : grid_(g), values_(g.total_cells(), fill) {}
    GridFunction(const Grid& g, std::vector<double> values) : grid_(g), values_(std::move(values)) {
        if (values_.size() != g.total_cells())
            throw std::invalid_argument("grid function: value count does not match grid");
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double at(const Offset& idx) const { return values_[grid_.linear_index(idx)]; }
    double& at(const Offset& idx) { return values_[grid_.linear_index(idx)]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    auto begin() { return values_.begin(); }
    auto end() { return values_.end(); }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

inline void check_same_grid(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument("grid mismatch");
}

namespace detail {

// 3-point Gauss-Legendre on [0,1].
inline constexpr std::array<double, 3> kGauss3Nodes = {
    0.5 - 0.387298334620741688518, 0.5, 0.5 + 0.387298334620741688518};
inline constexpr std::array<double, 3> kGauss3Weights = {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0};

} // namespace detail

/// Cell averages of a pointwise function: value at beta is h^{-N} times the
/// integral of u0 over cell beta, by a fixed 3^N-point tensor Gauss rule.
inline GridFunction cell_average(const std::function<double(const Point&)>& u0, const Grid& g) {
    GridFunction out(g);
    const std::size_t n = g.total_cells();
    for (std::size_t lin = 0; lin < n; ++lin) {
        const Offset idx = g.multi_index(lin);
        const Point corner = g.point(idx);
        double acc = 0.0;
        if (g.dim == 1) {
            for (int a = 0; a < 3; ++a)
                acc += detail::kGauss3Weights[a] *
                       u0({corner[0] + g.spacing * detail::kGauss3Nodes[a], 0, 0});
        } else if (g.dim == 2) {
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    acc += detail::kGauss3Weights[a] * detail::kGauss3Weights[b] *
                           u0({corner[0] + g.spacing * detail::kGauss3Nodes[a],
                               corner[1] + g.spacing * detail::kGauss3Nodes[b], 0});
        } else {
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 3; ++c)
                        acc += detail::kGauss3Weights[a] * detail::kGauss3Weights[b] *
                               detail::kGauss3Weights[c] *
                               u0({corner[0] + g.spacing * detail::kGauss3Nodes[a],
                                   corner[1] + g.spacing * detail::kGauss3Nodes[b],
                                   corner[2] + g.spacing * detail::kGauss3Nodes[c]});
        }
        out[lin] = acc;
    }
    return out;
}

/// Discrete L^p norm (h^N sum |u|^p)^{1/p}; max norm for p = infinity.
inline double lp_norm(const GridFunction& u, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : u) m = std::max(m, std::abs(v));
        return m;
    }
    const double vol = u.grid().cell_volume();
    double acc = 0.0;
    if (p == 1.0) {
        for (double v : u) acc += std::abs(v);
        return vol * acc;
    }
    if (p == 2.0) {
        for (double v : u) acc += v * v;
        return std::sqrt(vol * acc);
    }
    for (double v : u) acc += std::pow(std::abs(v), p);
    return std::pow(vol * acc, 1.0 / p);
}

/// h^N sum u (signed mass).
inline double mass(const GridFunction& u) {
    double acc = 0.0;
    for (double v : u) acc += v;
    return u.grid().cell_volume() * acc;
}

/// Right-hand side g: zero, a closed form g(x,t), or time-tabulated grid slices.
class SourceTerm {
public:
    using TimeFunction = std::function<double(const Point&, double)>;

    SourceTerm() = default; // zero

    static SourceTerm zero() { return SourceTerm{}; }
    static SourceTerm function(TimeFunction f) {
        SourceTerm s;
        s.fn_ = std::move(f);
        return s;
    }
    static SourceTerm tabulated(std::vector<double> times, std::vector<GridFunction> slices) {
        if (times.size() != slices.size() || times.empty())
            throw std::invalid_argument("source: tabulated times and slices must match and be nonempty");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw std::invalid_argument("source: tabulated times must be strictly increasing");
        SourceTerm s;
        s.times_ = std::move(times);
        s.slices_ = std::move(slices);
        return s;
    }

    bool is_zero() const { return !fn_ && slices_.empty(); }
    bool is_tabulated() const { return !slices_.empty(); }

    // Piecewise-linear-in-time interpolant of the table, clamped beyond the ends.
    double table_value(std::size_t cell, double t) const {
        if (t <= times_.front()) return slices_.front()[cell];
        if (t >= times_.back()) return slices_.back()[cell];
        std::size_t hi = 1;
        while (times_[hi] < t) ++hi;
        const double w = (t - times_[hi - 1]) / (times_[hi] - times_[hi - 1]);
        return (1.0 - w) * slices_[hi - 1][cell] + w * slices_[hi][cell];
    }

    const TimeFunction& closed_form() const { return fn_; }
    const std::vector<double>& table_times() const { return times_; }
    const std::vector<GridFunction>& table_slices() const { return slices_; }

private:
    TimeFunction fn_;
    std::vector<double> times_;
    std::vector<GridFunction> slices_;
};

/// Time average of g over [t0, t1]: 3-point Gauss for closed forms,
/// trapezoid on the available slices for tabulated sources.
inline GridFunction time_average_interval(const SourceTerm& g, double t0, double t1,
                                          const Grid& grid) {
    if (!(t1 > t0)) throw std::invalid_argument("time_average: empty interval");
    GridFunction out(grid);
    if (g.is_zero()) return out;
    const double dt = t1 - t0;
    if (g.is_tabulated()) {
        // Integrate the piecewise-linear interpolant exactly: trapezoid on the
        // knots falling inside [t0, t1] plus the clipped end segments.
        std::vector<double> knots;
        knots.push_back(t0);
        for (double t : g.table_times())
            if (t > t0 && t < t1) knots.push_back(t);
        knots.push_back(t1);
        for (std::size_t cell = 0; cell < out.size(); ++cell) {
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
                const double a = knots[i], b = knots[i + 1];
                acc += 0.5 * (b - a) * (g.table_value(cell, a) + g.table_value(cell, b));
            }
            out[cell] = acc / dt;
        }
        return out;
    }
    const auto& f = g.closed_form();
    const std::size_t n = grid.total_cells();
    for (std::size_t lin = 0; lin < n; ++lin) {
        const Point x = grid.point(grid.multi_index(lin));
        double acc = 0.0;
        for (int a = 0; a < 3; ++a)
            acc += detail::kGauss3Weights[a] * f(x, t0 + dt * detail::kGauss3Nodes[a]);
        out[lin] = acc;
    }
    return out;
}

/// G^j = time average of g over the j-th step [(j-1)k, jk], j >= 1.
inline GridFunction time_average(const SourceTerm& g, long j, double k, const Grid& grid) {
    if (j < 1) throw std::invalid_argument("time_average: step index must be >= 1");
    if (!(k > 0.0)) throw std::invalid_argument("time_average: step must be positive");
    return time_average_interval(g, (j - 1) * k, j * k, grid);
}

// --- CSV serialization ------------------------------------------------------
//
// Format: header line "# N,M,h", then one row per cell,
// "index_0,...,index_{N-1},value" in lexicographic index order.
// Doubles printed with 17 significant digits so finite values round-trip
// bit-exactly.

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_csv(const GridFunction& u, std::ostream& os) {
    const Grid& g = u.grid();
    os << "# " << g.dim << "," << g.cells << "," << format_double(g.spacing) << "\n";
    const std::size_t n = g.total_cells();
    for (std::size_t lin = 0; lin < n; ++lin) {
        const Offset idx = g.multi_index(lin);
        for (int d = 0; d < g.dim; ++d) os << idx[d] << ",";
        os << format_double(u[lin]) << "\n";
    }
}

inline GridFunction read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.size() < 2 || line[0] != '#')
        throw std::runtime_error("grid csv: missing header");
    int N = 0, M = 0;
    double h = 0.0;
    if (std::sscanf(line.c_str(), "# %d,%d,%lf", &N, &M, &h) != 3)
        throw std::runtime_error("grid csv: malformed header");
    Grid g(N, M, h);
    GridFunction u(g);
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        Offset idx{0, 0, 0};
        const char* p = line.c_str();
        char* endp = nullptr;
        for (int d = 0; d < N; ++d) {
            idx[d] = static_cast<int>(std::strtol(p, &endp, 10));
            if (endp == p || *endp != ',') throw std::runtime_error("grid csv: malformed row");
            if (idx[d] < 0 || idx[d] >= M) throw std::runtime_error("grid csv: index out of range");
            p = endp + 1;
        }
        const double v = std::strtod(p, &endp);
        if (endp == p) throw std::runtime_error("grid csv: malformed value");
        if (!std::isfinite(v)) throw std::runtime_error("grid csv: non-finite value");
        u.at(idx) = v;
        ++rows;
    }
    if (rows != g.total_cells()) throw std::runtime_error("grid csv: wrong row count");
    return u;
}

} // namespace levydiff
