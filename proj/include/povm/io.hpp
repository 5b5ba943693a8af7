#pragma once

// JSON (and newline-delimited JSON) forms of the library's values. Every
// emitted document carries "schema": 1; loaders accept a missing field but
// reject any other version.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "povm/continuous.hpp"
#include "povm/extremality.hpp"
#include "povm/merit.hpp"
#include "povm/sampling.hpp"
#include "povm/tomography.hpp"

namespace povm::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;

void check_schema(const Json &j);

// complex matrices are arrays of rows of [re, im] pairs
Json matrix_to_json(const Operator &m);
Operator matrix_from_json(const Json &j);

Json space_to_json(const OutcomeSpace &s);
OutcomeSpace space_from_json(const Json &j);

Json point_to_json(const OutcomePoint &p);
/// With a known space the point is checked against it; without one the kind
/// is inferred (array: direction, integer: label, float: angle).
OutcomePoint point_from_json(const Json &j, const std::optional<OutcomeSpace> &space, const Tolerances &tol = {});

Json povm_to_json(const FinitePovm &p);
FinitePovm povm_from_json(const Json &j, const Tolerances &tol = {});

Json decomposition_to_json(const DecompositionResult &r, bool complete = true);
DecompositionResult decomposition_from_json(const Json &j, const Tolerances &tol = {});

struct NamedState {
    std::string id;
    DensityMatrix rho;
};

/// {"id": ..., "matrix": ...} or, for qubits, {"id": ..., "bloch": [x, y, z]}
NamedState state_from_json(const Json &j, const Tolerances &tol = {});
Json state_to_json(const NamedState &s);
std::vector<NamedState> states_from_json(const Json &j, const Tolerances &tol = {});
Json states_to_json(std::span<const NamedState> states);

struct NamedRegion {
    std::string id;
    Region region;
};

/// Accepted kinds: "cap" {axis, half_angle}; "patch" {axis?, z: [lo, hi],
/// phi: [lo, len]}; "patches" {patches: [{frame, z, phi}]}; "arcs" {arcs:
/// [{start, length}]}; "labels" {n, members}; "whole" {space}. Any region may
/// carry "complement": true. Regions are written in canonical form.
Region region_from_json(const Json &j, const Tolerances &tol = {});
Json region_to_json(const Region &r);
std::vector<NamedRegion> regions_from_json(const Json &j, const Tolerances &tol = {});
Json regions_to_json(std::span<const NamedRegion> regions);

/// "spin", "spin_direction", "phase:d"
ContinuousPovm family_from_string(const std::string &s);
Json family_to_json(const ContinuousPovm &c);
ContinuousPovm family_from_json(const Json &j);

Json equivalence_to_json(const EquivalenceReport &r, std::span<const NamedState> states,
                         std::span<const NamedRegion> regions);

Json record_to_json(const OutcomeRecord &r);
OutcomeRecord record_from_json(const Json &j, const std::optional<OutcomeSpace> &outcome_space,
                               const std::optional<OutcomeSpace> &parameter_space);

/// The first line is a header {"schema": 1, "records": n, "space": ..., "parameter_space": ...}.
void write_records(std::ostream &os, std::span<const OutcomeRecord> records, const OutcomeSpace &space,
                   const std::optional<OutcomeSpace> &parameter_space);
std::vector<OutcomeRecord> read_records(std::istream &is);

Json gof_to_json(const GofReport &r);
Json merit_to_json(const MeritReport &r);
Json bayes_spec_to_json(const BayesGainSpec &s);
BayesGainSpec bayes_spec_from_json(const Json &j);
Json dual_to_json(const DualProcessing &d);
Json estimate_to_json(const EstimateReport &r);
Json validation_to_json(const ValidationReport &r);

Json read_json_file(const std::string &path);
/// Serializes with a trailing newline; `indent` < 0 gives the compact form.
void write_json_file(const std::string &path, const Json &j, int indent = 2);

} // namespace povm::io
