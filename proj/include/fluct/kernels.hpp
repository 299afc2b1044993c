#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "fluct/common.hpp"

namespace fluct {

// Interaction kernels Phi with nonnegative Fourier data.
//
// On the torus [0,2pi)^d a kernel is a finite list of modes (k, w) with
// w = Phi_hat(k) >= 0 and (k, w) present iff (-k, w) is, so that
//   Phi(x) = (2pi)^{-d} sum_k Phi_hat(k) e^{i k.x}
// is real, even and positive semi-definite. The spectral measure is
// nu({k}) = (2pi)^{-d} Phi_hat(k). The finite mode list makes nu finite by
// construction; kernels here are bandlimited, which is this toolkit's
// scope boundary (no Phi_hat outside the stored support).

using Wavevector = std::array<int, 2>; // second component 0 when dim == 1

inline int norm_sq(const Wavevector& k) { return k[0] * k[0] + k[1] * k[1]; }
inline Wavevector negate(const Wavevector& k) { return {-k[0], -k[1]}; }
inline bool is_zero(const Wavevector& k) { return k[0] == 0 && k[1] == 0; }

// Canonical representative of the pair {k, -k}: the lexicographically
// larger one (first nonzero component positive).
inline Wavevector canonical(const Wavevector& k) {
    if (k[0] > 0 || (k[0] == 0 && k[1] > 0)) return k;
    return negate(k);
}

struct NegativeWeightError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct AsymmetricModesError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct IndexOutOfSupportError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

class TorusKernel {
  public:
    TorusKernel() = default;

    int dim() const { return dim_; }
    double zero_weight() const { return zeroWeight_; }

    // Weight Phi_hat(k), 0 for k outside the stored mode list.
    double weight(const Wavevector& k) const;

    // Canonical nonzero representatives, ordered by (|k|^2, lexicographic).
    // This ordering defines the mode index n in phi_series_coeff and the
    // row pairing of the torus theory tables.
    const std::vector<Wavevector>& representatives() const { return reps_; }

    const std::map<Wavevector, double>& modes() const { return weights_; }

    friend TorusKernel torus_kernel_from_modes(
        int dim, const std::vector<std::pair<Wavevector, double>>& modeList,
        bool autoSymmetrize);

  private:
    int dim_ = 1;
    std::map<Wavevector, double> weights_; // full symmetric list
    std::vector<Wavevector> reps_;         // canonical k != 0, ordered
    double zeroWeight_ = 0.0;
};

// Complex Fourier amplitudes indexed by wavevector; absent entries are 0.
// Represents the Fourier data of a (signed) measure; for a real measure the
// entries satisfy entry(-k) = conj(entry(k)).
struct ModeVector {
    std::map<Wavevector, std::complex<double>> entries;

    std::complex<double> entry(const Wavevector& k) const {
        auto it = entries.find(k);
        return it == entries.end() ? std::complex<double>(0.0) : it->second;
    }
    void set(const Wavevector& k, std::complex<double> v) { entries[k] = v; }

    bool is_conjugate_symmetric(double tol = 1e-12) const;
};

// Validating constructor. With autoSymmetrize the missing -k partner of any
// mode is filled in with the same weight; otherwise an unpaired mode is an
// error. A duplicate k with a conflicting weight is always an error.
TorusKernel torus_kernel_from_modes(
    int dim, const std::vector<std::pair<Wavevector, double>>& modeList,
    bool autoSymmetrize = true);

// Phi = 1 + cos(x): modes {(0, 2pi), (1, pi), (-1, pi)}.
TorusKernel one_plus_cos_kernel();

// Phi(x) = (2pi)^{-d} sum_k Phi_hat(k) cos(k.x); the imaginary part of the
// exponential sum cancels exactly for a symmetric mode list.
double eval_kernel(const TorusKernel& kernel, const std::array<double, 2>& x);
double eval_kernel(const TorusKernel& kernel, double x); // dim 1

// Energy norm ||f||_Phi^2 = (2pi)^{-d} sum_k Phi_hat(k) |f_hat(k)|^2, i.e.
// the L^2(nu) norm of the mode vector.
double phi_norm_sq(const TorusKernel& kernel, const ModeVector& modes);

// Expansion coefficient of Phi against the torus eigenfunctions:
//   n = 0:  Phi_0    = (2pi)^{-d} Phi_hat(0)
//   n >= 1: Phi_{2n} = sqrt(2) (2pi)^{-d} Phi_hat(k(n))
// with k(n) the n-th canonical representative. With strict enumeration a
// zero-weight k(n) raises IndexOutOfSupportError.
double phi_series_coeff(const TorusKernel& kernel, int n, bool strict = false);

// Line-domain kernel: even evaluator Phi(x) plus its nonnegative spectral
// density Phi_hat(omega) sampled on a uniform symmetric grid. The two forms
// are the caller's responsibility to keep consistent; construction runs a
// spot quadrature check of Phi(x) = (2pi)^{-1} int Phi_hat(w) cos(wx) dw
// at a few points (tolerance 1e-6).
class LineKernel {
  public:
    LineKernel(std::function<double(double)> evaluator,
               std::vector<double> omegaGrid, std::vector<double> spectralDensity);

    double operator()(double x) const { return evaluator_(x); }
    const std::vector<double>& omega_grid() const { return omegaGrid_; }
    const std::vector<double>& spectral_density() const { return spectralDensity_; }
    double omega_spacing() const { return omegaSpacing_; }

  private:
    std::function<double(double)> evaluator_;
    std::vector<double> omegaGrid_;
    std::vector<double> spectralDensity_;
    double omegaSpacing_ = 0.0;
};

// Phi(x) = exp(-x^2 / (2 sigma^2)), Phi_hat(w) = sigma sqrt(2pi) exp(-sigma^2 w^2/2).
LineKernel gaussian_line_kernel(double sigma = 1.0, std::size_t gridPoints = 1201,
                                double omegaMax = 12.0);

} // namespace fluct
