#pragma once

namespace emsim {

/// Lifetimes in ns plus the ZPL branching fraction.
struct LifetimeSet {
    double tau_bulk_ns = 4.12;
    double tau_on_ns = 2.32;
    double tau_off_ns = 5.56;
    double xi_zpl = 0.36;

    void validate() const;
};

/// Photon-budget constants for the detection-efficiency chain.
struct PhotonBudget {
    double quantum_efficiency = 0.80;
    double zpl_fraction = 0.57;     ///< all four ZPL lines, of total emission
    double c_line_fraction = 0.80;  ///< C line share within the ZPL lines
    double psb_fraction = 0.43;
    double psb_after_filter = 0.35; ///< PSB surviving the 637 nm long-pass
    double detector_qe = 0.65;      ///< APD
    double snspd_qe = 1.0;
    double readout_counts = 18.0;   ///< mean PSB counts per readout bin
    double t_m_us = 50.0;           ///< readout window
    double tau_emitter_ns = 5.0;
    double eta_na_09 = 0.96;        ///< collection efficiency at NA 0.9 (design constant)
    double eta_na_05 = 0.78;        ///< collection efficiency at NA 0.5 (design constant)

    void validate() const;
};

/// Derived detection-efficiency chain. photon_zpl is the unrounded count of
/// ZPL C-line photons detected per readout window; photon_zpl_rounded is the
/// integer convention that rounds the chain up to whole photons before
/// dividing.
struct DetectionReport {
    double photon_total = 0.0;
    double zpl_to_psb_ratio = 0.0;
    double photon_zpl = 0.0;
    double photon_zpl_rounded = 0.0;
    double p_det = 0.0;
    double p_det_rounded = 0.0;
    double p_det_snspd = 0.0;
};

/// F_p = (tau_bulk/tau_on - tau_bulk/tau_off) / xi_zpl.
double purcell_from_lifetimes(const LifetimeSet& l);

/// F_p = 3/(4 pi^2) * (lambda/n)^3 * Q / V. With v_in_cubic_wavelengths the
/// mode volume is given in units of (lambda/n)^3 and the wavelength cancels.
double purcell_from_cavity(double wavelength_over_n, double q_factor, double v_mode,
                           bool v_in_cubic_wavelengths = false);

DetectionReport detection_probability(const PhotonBudget& b);

} // namespace emsim
