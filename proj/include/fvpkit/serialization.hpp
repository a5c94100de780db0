#pragma once

#include <filesystem>

#include "json.hpp"

#include "fvpkit/coercive_operator.hpp"
#include "fvpkit/fvp.hpp"
#include "fvpkit/neumann.hpp"
#include "fvpkit/source_term.hpp"
#include "fvpkit/trajectory.hpp"

namespace fvpkit {

using nlohmann::json;

/// Complex scalars serialize as a plain number when real, else [re, im].
json complex_to_json(const Complex& z);
Complex complex_from_json(const json& j);

json triple_to_json(const GelfandTriple& t);
GelfandTriple triple_from_json(const json& j);

/// {"backend": "spectral"|"matrix", "eigenvalues"|"matrix": …,
///  "gram_V": …, "gram_H": …,
///  "constants": {"C1":…,"C2":…,"C3":…,"C4":…,"k":…}}
json operator_to_json(const CoerciveOperator& op);
CoerciveOperator operator_from_json(const json& j);

/// {"geometry": {"type":"interval","L":…}|{"type":"rectangle","Lx":…,"Ly":…},
///  "N": …}
json neumann_to_json(const NeumannModel& m);
NeumannModel neumann_from_json(const json& j);

json source_term_to_json(const SourceTerm& f);
SourceTerm source_term_from_json(const json& j);

json fvp_data_to_json(const FvpData& d);
FvpData fvp_data_from_json(const json& j);

json compatibility_report_to_json(const CompatibilityReport& r);

/// CSV with columns t, coefficient_0 … coefficient_{N−1}.
void trajectory_to_csv(const Trajectory& traj, const std::filesystem::path& path);
void source_term_to_csv(const SourceTerm& f, const std::filesystem::path& path);

std::string verdict_name(Verdict v);

}  // namespace fvpkit
