#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pnet/core/model.hpp"
#include "pnet/core/network.hpp"
#include "pnet/labels/label.hpp"
#include "pnet/sim/config.hpp"

namespace pnet::sim {

/// Named input signals available to ENX/ENF modules at compile time.
using SignalBank = std::map<std::string, std::vector<double>>;

enum class MatTag : std::uint8_t { Mass, Cel, Fixed, Imposed };
enum class LinkTag : std::uint8_t { Spring, Damper, SpringDamper, Buffer, Nonlinear };

inline constexpr std::uint32_t kNone = 0xffffffffu;

struct ChannelSpec {
  ModuleId source;     // the SOX/SOF module
  ModuleKind kind;     // SOX or SOF
  std::uint32_t index; // MAT index (SOX) or link index (SOF)
  double gain;
};

/// Flat, immutable form of a validated network. MATs with a position and
/// links are numbered by ascending module id.
struct SimProgram {
  std::uint64_t revision = 0;
  double sample_rate = 44100.0;
  std::uint32_t trace_decimation = 64;

  // Point MATs (MAS, CEL, SOL, ENX).
  std::vector<ModuleId> mat_ids;
  std::vector<MatTag> mat_tag;
  std::vector<double> mass;
  std::vector<double> coef_a;  // CEL: 2 - K/M - Z/M, MAS: 2
  std::vector<double> coef_b;  // CEL: Z/M - 1,       MAS: -1
  std::vector<double> self_k;  // CEL own K, 0 otherwise
  std::vector<double> self_z;  // CEL own Z, 0 otherwise
  std::vector<double> x0;
  std::vector<double> v0;
  std::vector<std::uint32_t> mat_signal;  // ENX signal index or kNone

  // Incident links per MAT, ascending link index (CSR).
  std::vector<std::uint32_t> incident_offset;
  std::vector<std::uint32_t> incident_link;
  std::vector<std::uint8_t> incident_is_a;

  // ENF injections per MAT, ascending ENF id (CSR).
  std::vector<std::uint32_t> inject_offset;
  std::vector<std::uint32_t> inject_signal;

  // Links.
  std::vector<ModuleId> link_ids;
  std::vector<LinkTag> link_tag;
  std::vector<std::uint32_t> link_a;
  std::vector<std::uint32_t> link_b;
  std::vector<double> link_k;
  std::vector<double> link_z;
  std::vector<double> link_s;
  std::vector<std::uint32_t> link_table;  // index of the fK table; fZ follows
  std::vector<Table> tables;

  std::vector<ChannelSpec> channels;  // ascending observer id
  std::vector<std::vector<double>> signals;
  std::vector<std::string> signal_names;

  std::vector<std::uint32_t> trace_mats;
  std::vector<ModuleId> trace_ids;

  std::size_t mat_count() const { return mat_ids.size(); }
  std::size_t link_count() const { return link_ids.size(); }
  std::optional<std::uint32_t> mat_index(ModuleId id) const;
  std::optional<std::uint32_t> link_index(ModuleId id) const;
};

/// Builds a program from a network snapshot. Throws NotValidated when the
/// network has validation issues (input signals aside) and MissingSignal when
/// an ENX/ENF names a signal absent from `signals`. `traced` selects the
/// modules recorded in the motion trace; nullopt follows config.trace_mode
/// (All or None).
SimProgram compile(const Network& network, const SimConfig& config, const SignalBank& signals,
                   const std::optional<ModuleSet>& traced = std::nullopt);

/// Compiles the model with its own sim config, resolving the trace picker and
/// adding embedded signals to `external`.
SimProgram compile(const Model& model, const SignalBank& external = {});

/// Stiffness giving an undamped MAS-RES-SOL oscillator frequency `hz`.
double stiffness_for_frequency(double hz, double mass, double sample_rate);

/// Oscillation frequency of an undamped mass M on stiffness K.
double frequency_for_stiffness(double k, double mass, double sample_rate);

}  // namespace pnet::sim
