#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "ntk/asymptotics.hpp"
#include "ntk/kernel.hpp"
#include "ntk/regression.hpp"
#include "ntk/spectral.hpp"

namespace ntk {

using Json = nlohmann::ordered_json;

/// Shortest text that round-trips: 17 significant digits.
std::string format_double(double x);

Json to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const Json& j);

Json to_json(const DecayFit& fit);
Json to_json(const EdgeExpansion& e);
Json to_json(const ConvergenceReport& r);
Json spectrum_metadata(const Spectrum& s);

/// "# {metadata}" line, then k,lambda,multiplicity rows.
void write_spectrum_csv(std::ostream& out, const Spectrum& s);
Spectrum read_spectrum_csv(std::istream& in);

void write_accuracy_csv(std::ostream& out, const std::vector<AccuracyRow>& rows);
void write_convergence_csv(std::ostream& out, const ConvergenceReport& r);

}  // namespace ntk
