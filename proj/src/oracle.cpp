#include "nnosc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nnosc/format.hpp"

namespace nnosc {

SymTridiagonal::SymTridiagonal(std::vector<double> diag, std::vector<double> off)
    : diag_(std::move(diag)), off_(std::move(off)) {
    if (diag_.empty() || off_.size() + 1 != diag_.size()) {
        throw std::invalid_argument("tridiagonal matrix needs n diagonal and n-1 off-diagonal entries");
    }
}

std::size_t SymTridiagonal::count_below(double shift) const {
    // Pivots of LDL^T of (T - shift I); the count of negative pivots is the inertia.
    const double pivmin = std::numeric_limits<double>::min() * 4.0;
    std::size_t count = 0;
    double q = diag_[0] - shift;
    for (std::size_t i = 0;; ++i) {
        if (std::fabs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
        if (i + 1 == diag_.size()) break;
        q = diag_[i + 1] - shift - off_[i] * off_[i] / q;
    }
    return count;
}

std::pair<double, double> SymTridiagonal::gershgorin() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const std::size_t n = diag_.size();
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::fabs(off_[i - 1]);
        if (i + 1 < n) r += std::fabs(off_[i]);
        lo = std::min(lo, diag_[i] - r);
        hi = std::max(hi, diag_[i] + r);
    }
    return {lo, hi};
}

double SymTridiagonal::eigenvalue(std::size_t k) const {
    if (k >= size()) {
        throw std::out_of_range("eigenvalue index out of range");
    }
    auto [lo, hi] = gershgorin();
    const double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= 2.0 * eps * std::max(std::fabs(lo), std::fabs(hi))) break;
        if (count_below(mid) > k) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

// v[i+1] from rows i of (T - e I) v = 0, walking away from the end where the recurrence starts.
void rescale_if_large(std::vector<double>& v, std::size_t from, std::size_t to) {
    constexpr double big = 1e150;
    double m = 0.0;
    for (std::size_t i = from; i < to; ++i) m = std::max(m, std::fabs(v[i]));
    if (m > big) {
        for (std::size_t i = from; i < to; ++i) v[i] /= m;
    }
}

}  // namespace

std::vector<double> SymTridiagonal::eigenvector(double e) const {
    const std::size_t n = size();
    std::vector<double> v(n, 0.0);
    if (n == 1) {
        v[0] = 1.0;
        return v;
    }
    const std::size_t mid = n / 2;

    // Forward: row i gives off[i-1] v[i-1] + (d[i]-e) v[i] + off[i] v[i+1] = 0.
    std::vector<double> fwd(mid + 2, 0.0);
    fwd[0] = 1.0;
    for (std::size_t i = 0; i + 1 < fwd.size(); ++i) {
        const double prev = i > 0 ? off_[i - 1] * fwd[i - 1] : 0.0;
        fwd[i + 1] = -(prev + (diag_[i] - e) * fwd[i]) / off_[i];
        if ((i & 31) == 0) rescale_if_large(fwd, 0, i + 2);
    }
    rescale_if_large(fwd, 0, fwd.size());

    // Backward from the last row down to mid.
    std::vector<double> bwd(n, 0.0);
    bwd[n - 1] = 1.0;
    for (std::size_t i = n - 1; i > mid; --i) {
        const double next = i + 1 < n ? off_[i] * bwd[i + 1] : 0.0;
        bwd[i - 1] = -(next + (diag_[i] - e) * bwd[i]) / off_[i - 1];
        if ((i & 31) == 0) rescale_if_large(bwd, i - 1, n);
    }
    rescale_if_large(bwd, mid, n);

    // Match on the two shared points mid, mid + 1 (least squares scale).
    const double num = fwd[mid] * bwd[mid] + fwd[mid + 1] * bwd[mid + 1];
    const double den = bwd[mid] * bwd[mid] + bwd[mid + 1] * bwd[mid + 1];
    const double scale = den > 0.0 ? num / den : 1.0;
    for (std::size_t i = 0; i < mid; ++i) v[i] = fwd[i];
    for (std::size_t i = mid; i < n; ++i) v[i] = scale * bwd[i];

    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    if (m > 0.0 && std::isfinite(m)) {
        for (double& x : v) x /= m;
    }
    return v;
}

SymTridiagonal fd_hamiltonian(const PotentialSpec& spec, const CollocationGrid& grid) {
    const int interior = grid.n_points() - 2;
    const double h = grid.spacing();
    const double k = spec.kinetic_coeff() / (h * h);
    std::vector<double> diag(interior);
    std::vector<double> off(interior - 1, -k);
    for (int i = 0; i < interior; ++i) {
        diag[i] = 2.0 * k + potential_value(spec, grid.point(i + 1));
    }
    return SymTridiagonal(std::move(diag), std::move(off));
}

FdSpectrum fd_eigenvalues(const PotentialSpec& spec, const CollocationGrid& grid, int m) {
    if (m < 1) {
        throw std::invalid_argument("need at least one eigenvalue");
    }
    if (grid.n_points() < 10 * m) {
        throw std::invalid_argument("grid has " + std::to_string(grid.n_points()) + " points; " +
                                    std::to_string(m) + " levels need at least " + std::to_string(10 * m));
    }
    const SymTridiagonal t = fd_hamiltonian(spec, grid);
    FdSpectrum out{spec, grid, {}, {}, std::nullopt, 0.0, {}};
    out.eigenvalues.reserve(m);
    for (int k = 0; k < m; ++k) {
        const double e = t.eigenvalue(static_cast<std::size_t>(k));
        out.eigenvalues.push_back(e);
        const auto v = t.eigenvector(e);
        out.boundary_ratio = std::max({out.boundary_ratio, std::fabs(v.front()), std::fabs(v.back())});
    }
    if (out.boundary_ratio > kBoundaryWarnRatio) {
        out.warnings.push_back("domain too small: eigenvector weight " + format_real(out.boundary_ratio) +
                               " at |x| = L = " + format_real(grid.half_width()));
    }
    for (std::size_t k = 1; k < out.eigenvalues.size(); ++k) {
        if (!(out.eigenvalues[k] > out.eigenvalues[k - 1])) {
            out.warnings.push_back("eigenvalues not strictly increasing at level " + std::to_string(k));
        }
    }
    return out;
}

CollocationGrid refined_grid(const CollocationGrid& grid) {
    return CollocationGrid(grid.half_width(), 2 * grid.n_points() - 1);
}

FdSpectrum richardson_refine(const PotentialSpec& spec, const CollocationGrid& grid, int m) {
    FdSpectrum coarse = fd_eigenvalues(spec, grid, m);
    const FdSpectrum fine = fd_eigenvalues(spec, refined_grid(grid), m);
    std::vector<double> extrapolated(coarse.eigenvalues.size());
    for (std::size_t k = 0; k < extrapolated.size(); ++k) {
        extrapolated[k] = (4.0 * fine.eigenvalues[k] - coarse.eigenvalues[k]) / 3.0;
    }
    coarse.eigenvalues_fine = fine.eigenvalues;
    coarse.richardson_estimate = std::move(extrapolated);
    coarse.boundary_ratio = std::max(coarse.boundary_ratio, fine.boundary_ratio);
    return coarse;
}

double pure_quartic_ground_state() {
    static const double c =
        richardson_refine(PotentialSpec(1.0, 0.0, 1.0), CollocationGrid(6.0, kOracleGridPoints), 1).best()[0];
    return c;
}

double asymptotic_check(double lambda) {
    if (!(lambda >= 100.0)) {
        throw std::invalid_argument("asymptotic_check needs lambda >= 100");
    }
    return pure_quartic_ground_state() * std::cbrt(lambda);
}

CollocationGrid oracle_default_grid(const PotentialSpec& spec) {
    const double lambda = spec.lambda();
    if (lambda >= 100.0) {
        const double e_est = asymptotic_check(lambda);
        return CollocationGrid(std::max(3.0, 1.5 * std::pow(e_est / lambda, 0.25)), kOracleGridPoints);
    }
    return CollocationGrid(8.0, kOracleGridPoints);
}

std::string oracle_csv(const std::vector<FdSpectrum>& spectra) {
    std::string out = "lambda,level,eigenvalue_raw,eigenvalue_refined,grid_n,L\n";
    for (const auto& s : spectra) {
        for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
            out += format_real(s.spec.lambda()) + "," + std::to_string(k) + "," + format_real(s.eigenvalues[k]) +
                   "," + format_real(s.best()[k]) + "," + std::to_string(s.grid.n_points()) + "," +
                   format_real(s.grid.half_width()) + "\n";
        }
    }
    return out;
}

}  // namespace nnosc
