#pragma once

#include <iosfwd>
#include <string>

#include "rmtrans/config.hpp"
#include "rmtrans/ensemble.hpp"

namespace rmtrans {

// Check results bundled for reporting.
struct CheckResults {
    VanishingAmplitudeReport vanishing;
    FactorizationReport factorization;
    GreenCenterReport green_center;
    CorrelatorReport correlator;

    bool all_pass() const {
        return vanishing.pass && factorization.pass && green_center.diag_pass &&
               green_center.offdiag_pass && correlator.offdiag_pass;
    }
};

// Fixed-schema CSV: one row per (energy, channel pair) with columns
// E,pair,p_mc,p_err,p_analytic,Y,Y_isolated,Y_cross; floats carry 17
// significant digits.
void write_transmission_csv(std::ostream& out, const TransmissionCurve& curve);

// JSON document embedding the fully resolved configuration, the transmission
// curve, the resonance data, and the check reports. Identical inputs produce
// identical bytes; execution details (worker count) are deliberately omitted.
std::string run_json(const ParsedConfig& cfg, const TransmissionCurve& curve,
                     const CheckResults& checks);

// Convenience: format a double with 17 significant digits.
std::string format_g17(double v);

}  // namespace rmtrans
