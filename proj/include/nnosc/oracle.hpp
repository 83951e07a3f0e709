#ifndef NNOSC_ORACLE_HPP
#define NNOSC_ORACLE_HPP

#include <optional>
#include <string>
#include <vector>

#include "nnosc/ansatz.hpp"
#include "nnosc/operators.hpp"

namespace nnosc {

/// Real symmetric tridiagonal matrix: diag has n entries, off has n - 1.
class SymTridiagonal {
public:
    SymTridiagonal(std::vector<double> diag, std::vector<double> off);

    std::size_t size() const { return diag_.size(); }
    const std::vector<double>& diag() const { return diag_; }
    const std::vector<double>& off() const { return off_; }

    /// Number of eigenvalues strictly below shift (Sturm sequence / LDL^T inertia).
    std::size_t count_below(double shift) const;

    /// Gershgorin interval [lo, hi] containing the whole spectrum.
    std::pair<double, double> gershgorin() const;

    /// k-th smallest eigenvalue (k = 0 is the lowest) by bisection to full precision.
    double eigenvalue(std::size_t k) const;

    /// Eigenvector for an (accurate) eigenvalue, by inward recurrence from both ends
    /// matched in the middle; scaled so max |v| = 1.
    std::vector<double> eigenvector(double eigenvalue) const;

private:
    std::vector<double> diag_;
    std::vector<double> off_;
};

/// Second-order finite-difference Hamiltonian on the interior points of grid with
/// Dirichlet conditions psi(+-L) = 0.
SymTridiagonal fd_hamiltonian(const PotentialSpec& spec, const CollocationGrid& grid);

struct FdSpectrum {
    PotentialSpec spec;
    CollocationGrid grid;
    /// Lowest m eigenvalues on grid, ascending.
    std::vector<double> eigenvalues;
    /// Raw eigenvalues on the grid with half the spacing (richardson_refine only).
    std::vector<double> eigenvalues_fine;
    /// (4 E_{h/2} - E_h) / 3 (richardson_refine only).
    std::optional<std::vector<double>> richardson_estimate;
    /// Largest |psi| on the first/last interior point relative to max |psi|, over all returned levels.
    double boundary_ratio = 0.0;
    std::vector<std::string> warnings;

    /// richardson_estimate when present, otherwise the raw eigenvalues.
    const std::vector<double>& best() const { return richardson_estimate ? *richardson_estimate : eigenvalues; }
};

/// Eigenvector weight at the boundary above which a domain-too-small warning is attached.
inline constexpr double kBoundaryWarnRatio = 1e-6;

/// Lowest m eigenvalues of the finite-difference Hamiltonian.
/// Throws std::invalid_argument if m < 1 or grid.n_points() < 10 m.
FdSpectrum fd_eigenvalues(const PotentialSpec& spec, const CollocationGrid& grid, int m);

/// fd_eigenvalues on grid and on the grid with spacing h/2, plus the Richardson extrapolation.
FdSpectrum richardson_refine(const PotentialSpec& spec, const CollocationGrid& grid, int m);

/// Same half-width, spacing halved.
CollocationGrid refined_grid(const CollocationGrid& grid);

/// Ground state of -psi'' + x^4 psi.
double pure_quartic_ground_state();

/// c * lambda^(1/3) with c = pure_quartic_ground_state(): the large-lambda scaling of the
/// anharmonic_table ground state. Requires lambda >= 100.
double asymptotic_check(double lambda);

inline constexpr int kOracleGridPoints = 4001;

/// L = 8 with 4001 points; for lambda >= 100 L = max(3, 1.5 (E_est / lambda)^(1/4)) with
/// E_est from asymptotic_check.
CollocationGrid oracle_default_grid(const PotentialSpec& spec);

/// Oracle CSV: lambda,level,eigenvalue_raw,eigenvalue_refined,grid_n,L
std::string oracle_csv(const std::vector<FdSpectrum>& spectra);

}  // namespace nnosc

#endif  // NNOSC_ORACLE_HPP
