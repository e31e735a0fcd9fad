#pragma once

#include "drstop/ambiguity.hpp"
#include "drstop/game.hpp"
#include "drstop/momentbound.hpp"
#include "drstop/oracle.hpp"
#include "drstop/thresholds.hpp"

#include <json.hpp>

#include <string>

namespace drstop::io {

/// 12 significant digits, '.' separator, independent of the global locale.
std::string format_number(double x);

/// Rounds to the 12-digit representation so JSON output matches the CSV.
double round12(double x);

nlohmann::json to_json(const AmbiguitySpec& spec);
AmbiguitySpec spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DiscreteDistribution& dist);
DiscreteDistribution distribution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Majorant& m);
nlohmann::json to_json(const MomentBoundCertificate& cert);
nlohmann::json to_json(const ThresholdSchedule& s);
nlohmann::json to_json(const TurningPointReport& r);
nlohmann::json to_json(const SimulationReport& r);
nlohmann::json to_json(const CertificateReport& r);

}  // namespace drstop::io
