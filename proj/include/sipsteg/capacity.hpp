#pragma once

#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sipsteg/channels.hpp"
#include "sipsteg/config.hpp"
#include "sipsteg/message.hpp"

namespace sipsteg {

// Two accounting modes live here. Paper mode evaluates the per-method
// budget constants of the reference five-message scenario (summing to
// 2360 bits). Measured mode sums what the implemented channels actually
// achieve on a concrete flow, channel by channel.

enum class Method {
  transport_stego,
  sip_tokens,
  sip_security,
  sdp_stego,
  other_sip,
};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::transport_stego: return "transport_stego";
    case Method::sip_tokens: return "sip_tokens";
    case Method::sip_security: return "sip_security";
    case Method::sdp_stego: return "sdp_stego";
    case Method::other_sip: return "other_sip";
  }
  return "?";
}

enum class BudgetUnit { per_message, per_first_message, per_sdp_body };

struct MethodBudget {
  Method method;
  std::uint64_t bits_per_unit = 0;
  BudgetUnit unit = BudgetUnit::per_message;
};

struct ScenarioSpec {
  std::size_t n_messages = 0;
  std::size_t n_sdp_bodies = 0;
  std::vector<MethodBudget> budgets;

  std::size_t k() const { return budgets.size(); }

  void validate() const {
    if (n_sdp_bodies > n_messages) {
      throw ConfigViolation("scenario has more SDP bodies than messages");
    }
  }
};

struct CapacityEntry {
  std::string label;
  std::uint64_t bits = 0;
  std::string note;  // shown in text output only
};

struct CapacityReport {
  std::vector<CapacityEntry> per_method;
  std::uint64_t total = 0;

  static CapacityReport from_entries(std::vector<CapacityEntry> entries) {
    CapacityReport report;
    report.per_method = std::move(entries);
    report.total = std::accumulate(report.per_method.begin(), report.per_method.end(),
                                   std::uint64_t{0},
                                   [](std::uint64_t sum, const CapacityEntry& e) {
                                     return sum + e.bits;
                                   });
    return report;
  }

  std::string to_machine() const {
    std::ostringstream out;
    for (const auto& e : per_method) out << e.label << "=" << e.bits << "\n";
    out << "total=" << total << "\n";
    return out.str();
  }

  std::string to_text() const {
    std::size_t width = 5;  // "total"
    for (const auto& e : per_method) width = std::max(width, e.label.size());
    std::ostringstream out;
    for (const auto& e : per_method) {
      out << e.label << std::string(width - e.label.size(), ' ') << "  " << e.bits
          << " bits";
      if (!e.note.empty()) out << "  (" << e.note << ")";
      out << "\n";
    }
    out << "total" << std::string(width - 5, ' ') << "  " << total << " bits\n";
    return out.str();
  }
};

/// The reference scenario: five one-direction signalling messages, two of
/// them carrying an SDP body, with the per-method budget constants.
inline ScenarioSpec paper_scenario() {
  ScenarioSpec spec;
  spec.n_messages = 5;
  spec.n_sdp_bodies = 2;
  spec.budgets = {
      {Method::transport_stego, 16, BudgetUnit::per_message},
      {Method::sip_tokens, 480, BudgetUnit::per_first_message},
      {Method::sip_security, 160, BudgetUnit::per_message},
      {Method::sdp_stego, 480, BudgetUnit::per_sdp_body},
      {Method::other_sip, 8, BudgetUnit::per_message},
  };
  return spec;
}

/// B_j per method is bits_per_unit times the applicable unit count; the
/// total is their plain sum.
inline CapacityReport compute_total(const ScenarioSpec& spec) {
  spec.validate();
  std::vector<CapacityEntry> entries;
  entries.reserve(spec.budgets.size());
  for (const auto& budget : spec.budgets) {
    std::size_t units = 0;
    switch (budget.unit) {
      case BudgetUnit::per_message: units = spec.n_messages; break;
      case BudgetUnit::per_first_message: units = spec.n_messages > 0 ? 1 : 0; break;
      case BudgetUnit::per_sdp_body: units = spec.n_sdp_bodies; break;
    }
    entries.push_back({std::string(to_string(budget.method)), budget.bits_per_unit * units, ""});
  }
  return CapacityReport::from_entries(std::move(entries));
}

/// Sums per-channel capacity over a concrete flow. Capacities are measured
/// on the message as earlier channels would have left it (free-text
/// embedding adds headers, which widens the whitespace and case channels),
/// so the result equals what flow embedding can really consume. The CSeq
/// channel only counts on the flow's first message. Transport-layer
/// steganography needs raw packet access and is reported as zero.
inline CapacityReport measured_scenario(const std::vector<SipMessage>& flow,
                                        const ChannelConfig& cfg,
                                        std::span<const ChannelId> enabled) {
  const std::vector<ChannelId> channels = ordered_channels(enabled);
  std::vector<CapacityEntry> entries;
  entries.reserve(channels.size() + 1);
  for (ChannelId id : channels) entries.push_back({std::string(to_string(id)), 0, ""});

  for (std::size_t index = 0; index < flow.size(); ++index) {
    SipMessage msg = flow[index];
    for (std::size_t c = 0; c < channels.size(); ++c) {
      if (channels[c] == ChannelId::cseq && index > 0) continue;
      const std::size_t bits = channel(channels[c]).capacity(msg, cfg);
      if (bits == 0) continue;
      entries[c].bits += bits;
      msg = channel(channels[c]).embed(msg, BitString{}, cfg).message;
    }
  }
  entries.push_back({std::string(to_string(Method::transport_stego)), 0, "out of scope"});
  return CapacityReport::from_entries(std::move(entries));
}

}  // namespace sipsteg
