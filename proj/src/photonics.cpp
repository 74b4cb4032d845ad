#include "emsim/photonics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "emsim/errors.hpp"

namespace emsim {

void LifetimeSet::validate() const {
    if (tau_bulk_ns <= 0.0 || tau_on_ns <= 0.0 || tau_off_ns <= 0.0)
        throw config_error("lifetimes must be > 0");
    if (tau_on_ns >= tau_off_ns)
        throw std::domain_error("no resonant enhancement: tau_on must be < tau_off");
    if (xi_zpl <= 0.0 || xi_zpl > 1.0) throw config_error("xi_zpl must lie in (0, 1]");
}

void PhotonBudget::validate() const {
    auto frac = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!frac(quantum_efficiency) || !frac(zpl_fraction) || !frac(c_line_fraction) ||
        !frac(psb_fraction) || !frac(psb_after_filter) || !frac(detector_qe) || !frac(snspd_qe))
        throw config_error("photon budget fractions must lie in (0, 1]");
    if (std::abs(zpl_fraction + psb_fraction - 1.0) > 1e-9)
        throw config_error("zpl_fraction + psb_fraction must equal 1");
    if (readout_counts < 0.0) throw config_error("readout_counts must be >= 0");
    if (t_m_us <= 0.0) throw config_error("t_m must be > 0");
    if (tau_emitter_ns <= 0.0) throw std::domain_error("tau_emitter must be > 0");
}

double purcell_from_lifetimes(const LifetimeSet& l) {
    l.validate();
    return (l.tau_bulk_ns / l.tau_on_ns - l.tau_bulk_ns / l.tau_off_ns) / l.xi_zpl;
}

double purcell_from_cavity(double wavelength_over_n, double q_factor, double v_mode,
                           bool v_in_cubic_wavelengths) {
    if (wavelength_over_n <= 0.0 || q_factor <= 0.0 || v_mode <= 0.0)
        throw std::domain_error("purcell_from_cavity: inputs must be > 0");
    const double lam3 = std::pow(wavelength_over_n, 3);
    const double v = v_in_cubic_wavelengths ? v_mode * lam3 : v_mode;
    return 3.0 / (4.0 * std::numbers::pi * std::numbers::pi) * lam3 * q_factor / v;
}

DetectionReport detection_probability(const PhotonBudget& b) {
    b.validate();

    DetectionReport r;
    r.photon_total = b.t_m_us * 1e3 / b.tau_emitter_ns;
    r.zpl_to_psb_ratio = b.zpl_fraction * b.c_line_fraction / b.psb_after_filter;
    // PSB counts and ZPL photons land on the same detector, so the QE in the
    // count->photon step cancels against the detection step.
    r.photon_zpl = b.readout_counts * r.zpl_to_psb_ratio;
    r.photon_zpl_rounded = std::ceil(r.photon_zpl);
    r.p_det = r.photon_zpl / r.photon_total;
    r.p_det_rounded = r.photon_zpl_rounded / r.photon_total;
    r.p_det_snspd = b.readout_counts / b.detector_qe * r.zpl_to_psb_ratio * b.snspd_qe /
                    r.photon_total;
    return r;
}

} // namespace emsim
