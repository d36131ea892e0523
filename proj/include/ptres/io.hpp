#pragma once

#include "ptres/channels.hpp"
#include "ptres/combs.hpp"
#include "ptres/superprocess.hpp"
#include "ptres/tensor.hpp"

#include <json.hpp>
#include <stdexcept>
#include <string>

namespace ptres {

using Json = nlohmann::ordered_json;

/// Malformed or unreadable document; the message names the first offending field.
struct FormatError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Shared tensor format:
//   {"kind": ..., "legs": [{"name","dim","role","step"}...],
//    "matrix": {"re": [...], "im": [...]}}   row-major, (prod dims)^2 entries
// plus kind-specific fields ("steps", "mode" for processes; "trace_preserving"
// for channels).

Json tensor_json(const LabeledOperator& op);
LabeledOperator tensor_from_json(const Json& j, double tol = kDefaultTol);

Json process_json(const ProcessTensor& t);
ProcessTensor process_from_json(const Json& j, double tol = kDefaultTol);

/// Channel legs are in0.., out0.. as produced by QuantumChannel.
Json channel_json(const QuantumChannel& ch);
QuantumChannel channel_from_json(const Json& j, double tol = kDefaultTol);

/// Density operator on arbitrary ancilla legs.
Json state_json(const DensityOperator& rho);
DensityOperator state_from_json(const Json& j, double tol = kDefaultTol);

Json read_json(const std::string& path);
/// Writes `doc` with a trailing newline; the same value always gives the same bytes.
void write_json(const std::string& path, const Json& doc);

ProcessTensor read_process(const std::string& path, double tol = kDefaultTol);
void write_process(const std::string& path, const ProcessTensor& t);
QuantumChannel read_channel(const std::string& path, double tol = kDefaultTol);
void write_channel(const std::string& path, const QuantumChannel& ch);
DensityOperator read_state(const std::string& path, double tol = kDefaultTol);
void write_state(const std::string& path, const DensityOperator& rho);

/// Dynamics manifest:
///   {"kind": "dynamics", "mode": "state"|"open", "initial_state": file,
///    "channels": [file, ...]}
/// The initial state lives on (s) or (s, e) in state mode and on e in open
/// mode; channels act on (s, e). Paths are relative to the manifest.
ProcessTensor build_from_manifest(const std::string& path, double tol = kDefaultTol);

/// Superprocess manifest:
///   {"kind": "superprocess", "theory": "c,k", "steps": n, "ds": d, "dz": d,
///    "ancilla": file, "V": [...], "W": [...], "C": [...], "K": [...]}
Superprocess read_superprocess(const std::string& path, double tol = kDefaultTol);
/// Writes the manifest and its component files next to it (stem_V0.json, ...).
void write_superprocess(const std::string& path, const Superprocess& z);

}  // namespace ptres
