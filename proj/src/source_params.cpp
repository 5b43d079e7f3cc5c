#include "abrsim/source_params.hpp"

namespace abrsim {

std::string SourceParams::validate() const {
    if (pcr_cps <= 0) return "PCR must be positive";
    if (mcr_cps < 0) return "MCR must be non-negative";
    if (icr_cps <= 0) return "ICR must be positive";
    if (mcr_cps > icr_cps) return "MCR exceeds ICR";
    if (icr_cps > pcr_cps) return "ICR exceeds PCR";
    if (rif <= 0 || rif > 1) return "RIF must be in (0, 1]";
    if (rdf <= 0) return "RDF must be positive";
    if (nrm < 2) return "Nrm must be at least 2";
    if (mrm < 1) return "Mrm must be at least 1";
    if (trm_ns <= 0) return "Trm must be positive";
    if (tof < 1) return "TOF must be at least 1";
    if (tdf < 0) return "TDF must be non-negative";
    if (headroom_cps < 0) return "headroom must be non-negative";
    if (frtt_ns <= 0) return "FRTT must be positive";
    if (addf <= 0) return "ADDF must be positive";
    if (tbe < 0) return "TBE must be non-negative";
    if (atdf_ns <= 0) return "ATDF must be positive";
    if (delta_cps < 0) return "delta must be non-negative";
    return {};
}

}  // namespace abrsim
