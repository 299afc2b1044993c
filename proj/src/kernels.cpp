#include "fluct/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fluct {

namespace {

std::string format_wavevector(const Wavevector& k, int dim) {
    std::ostringstream os;
    if (dim == 1)
        os << k[0];
    else
        os << "(" << k[0] << "," << k[1] << ")";
    return os.str();
}

} // namespace

double TorusKernel::weight(const Wavevector& k) const {
    auto it = weights_.find(k);
    return it == weights_.end() ? 0.0 : it->second;
}

bool ModeVector::is_conjugate_symmetric(double tol) const {
    for (const auto& [k, v] : entries) {
        if (std::abs(v - std::conj(entry(negate(k)))) > tol) return false;
    }
    return true;
}

TorusKernel torus_kernel_from_modes(
    int dim, const std::vector<std::pair<Wavevector, double>>& modeList,
    bool autoSymmetrize) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("torus kernel dimension must be 1 or 2");
    if (modeList.empty())
        throw std::invalid_argument("torus kernel mode list must be nonempty");

    TorusKernel kernel;
    kernel.dim_ = dim;
    for (const auto& [k, w] : modeList) {
        if (dim == 1 && k[1] != 0)
            throw std::invalid_argument("second wavevector component must be 0 for dim 1");
        if (w < 0.0)
            throw NegativeWeightError("negative spectral weight at mode " +
                                      format_wavevector(k, dim));
        auto [it, inserted] = kernel.weights_.emplace(k, w);
        if (!inserted && it->second != w)
            throw std::invalid_argument("conflicting duplicate weight at mode " +
                                        format_wavevector(k, dim));
    }

    // Symmetrize or reject unpaired modes.
    for (const auto& [k, w] : std::map<Wavevector, double>(kernel.weights_)) {
        const Wavevector mk = negate(k);
        auto it = kernel.weights_.find(mk);
        if (it == kernel.weights_.end()) {
            if (!autoSymmetrize)
                throw AsymmetricModesError("mode " + format_wavevector(k, dim) +
                                           " present without its mirror");
            kernel.weights_.emplace(mk, w);
        } else if (it->second != w) {
            throw AsymmetricModesError("mirror weights differ at mode " +
                                       format_wavevector(k, dim));
        }
    }

    kernel.zeroWeight_ = kernel.weight({0, 0});
    for (const auto& [k, w] : kernel.weights_) {
        if (!is_zero(k) && canonical(k) == k) kernel.reps_.push_back(k);
    }
    std::sort(kernel.reps_.begin(), kernel.reps_.end(),
              [](const Wavevector& a, const Wavevector& b) {
                  const int na = norm_sq(a), nb = norm_sq(b);
                  return na != nb ? na < nb : a < b;
              });
    return kernel;
}

TorusKernel one_plus_cos_kernel() {
    return torus_kernel_from_modes(
        1, {{{0, 0}, kTwoPi}, {{1, 0}, 0.5 * kTwoPi}, {{-1, 0}, 0.5 * kTwoPi}});
}

double eval_kernel(const TorusKernel& kernel, const std::array<double, 2>& x) {
    double sum = 0.0;
    for (const auto& [k, w] : kernel.modes())
        sum += w * std::cos(k[0] * x[0] + k[1] * x[1]);
    const double scale = kernel.dim() == 1 ? kTwoPi : kTwoPi * kTwoPi;
    return sum / scale;
}

double eval_kernel(const TorusKernel& kernel, double x) {
    return eval_kernel(kernel, {x, 0.0});
}

double phi_norm_sq(const TorusKernel& kernel, const ModeVector& modes) {
    double sum = 0.0;
    for (const auto& [k, w] : kernel.modes())
        sum += w * std::norm(modes.entry(k));
    const double scale = kernel.dim() == 1 ? kTwoPi : kTwoPi * kTwoPi;
    return sum / scale;
}

double phi_series_coeff(const TorusKernel& kernel, int n, bool strict) {
    const double scale = kernel.dim() == 1 ? kTwoPi : kTwoPi * kTwoPi;
    if (n < 0) throw IndexOutOfSupportError("negative mode index");
    if (n == 0) return kernel.zero_weight() / scale;
    if (static_cast<std::size_t>(n) > kernel.representatives().size())
        throw IndexOutOfSupportError("mode index beyond kernel support");
    const double w = kernel.weight(kernel.representatives()[n - 1]);
    if (strict && w == 0.0)
        throw IndexOutOfSupportError("zero-weight mode under strict enumeration");
    return std::sqrt(2.0) * w / scale;
}

LineKernel::LineKernel(std::function<double(double)> evaluator,
                       std::vector<double> omegaGrid,
                       std::vector<double> spectralDensity)
    : evaluator_(std::move(evaluator)),
      omegaGrid_(std::move(omegaGrid)),
      spectralDensity_(std::move(spectralDensity)) {
    if (!evaluator_) throw std::invalid_argument("line kernel needs an evaluator");
    if (omegaGrid_.size() < 3 || omegaGrid_.size() != spectralDensity_.size())
        throw std::invalid_argument("line kernel spectral grid malformed");
    omegaSpacing_ = omegaGrid_[1] - omegaGrid_[0];
    for (std::size_t i = 0; i + 1 < omegaGrid_.size(); ++i) {
        if (std::abs(omegaGrid_[i + 1] - omegaGrid_[i] - omegaSpacing_) > 1e-12)
            throw std::invalid_argument("line kernel spectral grid must be uniform");
    }
    for (double v : spectralDensity_) {
        if (v < 0.0) throw NegativeWeightError("negative spectral density on line kernel");
    }

    const double phi0 = evaluator_(0.0);
    for (double x : {0.0, 0.5, 1.0, 2.0}) {
        if (evaluator_(x) != evaluator_(-x))
            throw std::invalid_argument("line kernel evaluator is not even");
        if (std::abs(evaluator_(x)) > phi0 + 1e-12)
            throw std::invalid_argument("line kernel violates Phi(0) >= |Phi(x)|");
        // Spot quadrature reconstruction against the spectral form.
        double quad = 0.0;
        for (std::size_t i = 0; i < omegaGrid_.size(); ++i) {
            const double w = (i == 0 || i + 1 == omegaGrid_.size()) ? 0.5 : 1.0;
            quad += w * spectralDensity_[i] * std::cos(omegaGrid_[i] * x);
        }
        quad *= omegaSpacing_ / kTwoPi;
        if (std::abs(quad - evaluator_(x)) > 1e-6)
            throw std::invalid_argument(
                "line kernel evaluator and spectral density disagree (spot check)");
    }
}

LineKernel gaussian_line_kernel(double sigma, std::size_t gridPoints, double omegaMax) {
    if (sigma <= 0.0) throw std::invalid_argument("gaussian kernel width must be positive");
    std::vector<double> omega(gridPoints), density(gridPoints);
    const double h = 2.0 * omegaMax / static_cast<double>(gridPoints - 1);
    const double amp = sigma * std::sqrt(kTwoPi);
    for (std::size_t i = 0; i < gridPoints; ++i) {
        omega[i] = -omegaMax + static_cast<double>(i) * h;
        density[i] = amp * std::exp(-0.5 * sigma * sigma * omega[i] * omega[i]);
    }
    const double s2 = 2.0 * sigma * sigma;
    return LineKernel([s2](double x) { return std::exp(-x * x / s2); },
                      std::move(omega), std::move(density));
}

Grid make_torus_grid(std::size_t n) {
    if (n < 4) throw std::invalid_argument("torus grid needs at least 4 points");
    Grid g;
    g.domain = Domain::Torus;
    g.spacing = kTwoPi / static_cast<double>(n);
    g.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.x[i] = static_cast<double>(i) * g.spacing;
    return g;
}

Grid make_line_grid(std::size_t n, double halfWidth) {
    if (n < 4) throw std::invalid_argument("line grid needs at least 4 points");
    if (halfWidth <= 0.0) throw std::invalid_argument("line grid half-width must be positive");
    Grid g;
    g.domain = Domain::Line;
    g.spacing = 2.0 * halfWidth / static_cast<double>(n - 1);
    g.x.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g.x[i] = -halfWidth + static_cast<double>(i) * g.spacing;
    return g;
}

} // namespace fluct
