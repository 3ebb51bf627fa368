#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sipsteg/alphabet.hpp"
#include "sipsteg/channels.hpp"
#include "sipsteg/config.hpp"
#include "sipsteg/message.hpp"
#include "sipsteg/permutation.hpp"

namespace sipsteg {

// The warden's side: passive scanners that look for the fingerprints each
// channel leaves. Whitespace, case and order modulation are structurally
// visible and detected exactly; token channels only get a length-window and
// chi-square heuristic, which well-randomized payloads will defeat.

enum class Severity { low, medium, high };

inline std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::low: return "low";
    case Severity::medium: return "medium";
    case Severity::high: return "high";
  }
  return "?";
}

struct Finding {
  ChannelId channel_suspected = ChannelId::whitespace;
  std::size_t message_index = 0;
  std::size_t line_index = 0;  // 1-based; line 1 is the start line
  Severity severity = Severity::low;
  std::string evidence;  // excerpt, at most 80 characters
};

struct ScanReport {
  std::vector<Finding> findings;
  std::map<ChannelId, std::size_t> per_channel_counts;
  bool clean = true;

  static ScanReport from_findings(std::vector<Finding> findings) {
    ScanReport report;
    report.findings = std::move(findings);
    for (const auto& f : report.findings) ++report.per_channel_counts[f.channel_suspected];
    report.clean = report.findings.empty();
    return report;
  }

  std::string to_machine() const {
    std::ostringstream out;
    for (const auto& f : findings) {
      out << "finding " << to_string(f.channel_suspected) << " msg=" << f.message_index
          << " line=" << f.line_index << " sev=" << to_string(f.severity) << " "
          << f.evidence << "\n";
    }
    return out.str();
  }

  std::string to_text() const {
    std::ostringstream out;
    if (clean) {
      out << "clean: no covert-channel indicators found\n";
      return out.str();
    }
    for (const auto& f : findings) {
      out << "[" << to_string(f.severity) << "] " << to_string(f.channel_suspected)
          << " message " << f.message_index << " line " << f.line_index << ": "
          << f.evidence << "\n";
    }
    out << findings.size() << " finding(s)\n";
    return out.str();
  }
};

namespace detail {

inline std::string clip_evidence(std::string text) {
  if (text.size() > 80) text.resize(80);
  return text;
}

inline std::string describe_ws_run(const std::string& run) {
  std::string out;
  for (std::size_t i = 0; i < run.size() && i < 8; ++i) {
    out += run[i] == '\t' ? "[HT]" : "[SP]";
  }
  if (run.size() > 8) out += "...";
  out += " (" + std::to_string(run.size()) + " chars)";
  return out;
}

/// Chi-square per degree of freedom of the character histogram against the
/// uniform distribution over the alphabet.
inline double chi2_per_dof(std::string_view text, const Alphabet& alphabet) {
  const std::size_t k = std::size_t{1} << alphabet.bits_per_symbol();
  std::vector<double> counts(k, 0.0);
  for (char c : text) counts[alphabet.index_of(c)] += 1.0;
  const double expected = static_cast<double>(text.size()) / static_cast<double>(k);
  double chi2 = 0.0;
  for (double observed : counts) {
    const double d = observed - expected;
    chi2 += d * d / expected;
  }
  return chi2 / static_cast<double>(k - 1);
}

inline bool all_in(std::string_view text, const Alphabet& alphabet) {
  return std::all_of(text.begin(), text.end(), [&](char c) { return alphabet.contains(c); });
}

inline std::size_t header_line(const SipMessage& msg, const HeaderField* h) {
  return 2 + static_cast<std::size_t>(h - msg.headers.data());
}

}  // namespace detail

/// One finding per line carrying a trailing SP/HT run; high severity when a
/// tab is present (mainstream stacks never emit one there).
inline std::vector<Finding> scan_whitespace(const SipMessage& msg) {
  std::vector<Finding> out;
  const auto check = [&out](const std::string& run, std::size_t line) {
    if (run.empty()) return;
    const bool has_tab = run.find('\t') != std::string::npos;
    out.push_back({ChannelId::whitespace, 0, line,
                   has_tab ? Severity::high : Severity::medium,
                   detail::clip_evidence("trailing " + detail::describe_ws_run(run))});
  };
  check(msg.start_line.trailing_ws, 1);
  for (std::size_t i = 0; i < msg.headers.size(); ++i) {
    check(msg.headers[i].trailing_ws, 2 + i);
  }
  return out;
}

/// Flags header names written all-upper or all-lower when that differs from
/// the standard mixed-case spelling.
inline std::vector<Finding> scan_case(const SipMessage& msg) {
  std::vector<Finding> out;
  for (std::size_t i = 0; i < msg.headers.size(); ++i) {
    const std::string& name = msg.headers[i].raw_name;
    const bool has_lower = std::any_of(name.begin(), name.end(), [](char c) {
      return std::islower(static_cast<unsigned char>(c));
    });
    const bool has_upper = std::any_of(name.begin(), name.end(), [](char c) {
      return std::isupper(static_cast<unsigned char>(c));
    });
    const bool monocase = (has_lower != has_upper);
    if (monocase && name != canonical_header_case(msg.headers[i].canonical_name())) {
      out.push_back({ChannelId::case_modulation, 0, 2 + i, Severity::high,
                     detail::clip_evidence(name)});
    }
  }
  return out;
}

/// Compares the reorderable headers against the reference permutation and
/// reports the observed permutation index when they deviate.
inline std::vector<Finding> scan_order(const SipMessage& msg,
                                       std::span<const std::string> reference_order) {
  const auto view = detail::reorder_view(msg.headers, reference_order);
  if (view.has_duplicates || view.slots.size() < 2) return {};
  Permutation perm(view.slots.size());
  for (std::size_t i = 0; i < view.slots.size(); ++i) {
    const auto it = std::find(view.sorted_by_name.begin(), view.sorted_by_name.end(),
                              view.slots[i]);
    perm[i] = static_cast<unsigned>(it - view.sorted_by_name.begin());
  }
  const std::uint64_t index = lehmer_decode(perm);
  if (index == 0) return {};
  return {{ChannelId::header_reorder, 0, 2 + view.slots.front(), Severity::low,
           detail::clip_evidence("header order permutation index " + std::to_string(index) +
                                 " over " + std::to_string(view.slots.size()) +
                                 " reorderable headers")}};
}

/// Heuristic checks on the token-valued fields: implausible lengths,
/// degenerate character histograms, a Max-Forwards away from 70, and a
/// boundary that is not 16 hex characters.
inline std::vector<Finding> scan_tokens(const SipMessage& msg, const ScanConfig& cfg) {
  std::vector<Finding> out;

  const auto check_token = [&](ChannelId id, const HeaderField* h, std::string_view token,
                               const Alphabet& alphabet, std::size_t len_min,
                               std::size_t len_max, std::string_view what) {
    const std::size_t line = detail::header_line(msg, h);
    if (token.size() < len_min || token.size() > len_max) {
      out.push_back({id, 0, line, Severity::low,
                     detail::clip_evidence(std::string(what) + " length " +
                                           std::to_string(token.size()) + " outside [" +
                                           std::to_string(len_min) + "," +
                                           std::to_string(len_max) + "]")});
      return;
    }
    if (token.size() < cfg.chi2_min_chars || !detail::all_in(token, alphabet)) return;
    const double score = detail::chi2_per_dof(token, alphabet);
    if (score > cfg.chi2_threshold) {
      std::ostringstream evidence;
      evidence << what << " histogram chi2/dof=" << score << " exceeds "
               << cfg.chi2_threshold;
      out.push_back({id, 0, line, Severity::low, detail::clip_evidence(evidence.str())});
    }
  };

  if (const HeaderField* from = msg.find_header("from")) {
    if (const auto tag = from->param("tag")) {
      check_token(ChannelId::tag, from, *tag, Alphabet::hex(), cfg.tag_len_min,
                  cfg.tag_len_max, "tag");
    }
  }
  if (const HeaderField* via = msg.find_header("via")) {
    if (const auto branch = via->param("branch")) {
      if (branch->starts_with(detail::kMagicCookie)) {
        check_token(ChannelId::branch, via,
                    std::string_view(*branch).substr(detail::kMagicCookie.size()),
                    Alphabet::token64(), cfg.branch_len_min, cfg.branch_len_max, "branch");
      }
    }
  }
  if (const HeaderField* callid = msg.find_header("call-id")) {
    std::string_view local = callid->value;
    const std::size_t at = local.find('@');
    if (at != std::string_view::npos) local = local.substr(0, at);
    check_token(ChannelId::call_id, callid, local, Alphabet::hex(), cfg.callid_len_min,
                cfg.callid_len_max, "Call-ID local part");
  }
  if (const HeaderField* mf = msg.find_header("max-forwards")) {
    long value = -1;
    try {
      value = static_cast<long>(decimal_parse(mf->value, 64));
    } catch (const SymbolNotInAlphabet&) {
      value = -1;
    }
    if (value != cfg.max_forwards_expected) {
      out.push_back({ChannelId::max_forwards, 0, detail::header_line(msg, mf), Severity::low,
                     detail::clip_evidence("Max-Forwards: " + mf->value)});
    }
  }
  if (const auto* mp = std::get_if<MultipartBody>(&msg.body)) {
    if (mp->boundary.size() != cfg.boundary_len_expected ||
        !detail::all_in(mp->boundary, Alphabet::hex())) {
      const HeaderField* ct = msg.find_header("content-type");
      out.push_back({ChannelId::smime_boundary, 0, ct ? detail::header_line(msg, ct) : 0,
                     Severity::low,
                     detail::clip_evidence("boundary '" + mp->boundary + "' is not " +
                                           std::to_string(cfg.boundary_len_expected) +
                                           " hex chars")});
    }
  }
  return out;
}

inline ScanReport scan_message(const SipMessage& msg, const ScanConfig& cfg) {
  std::vector<std::string> reference = cfg.reorderable_headers;
  std::vector<Finding> findings = scan_whitespace(msg);
  for (auto& scanner_out : {scan_case(msg), scan_order(msg, reference), scan_tokens(msg, cfg)}) {
    findings.insert(findings.end(), scanner_out.begin(), scanner_out.end());
  }
  return ScanReport::from_findings(std::move(findings));
}

inline ScanReport scan_flow(const std::vector<SipMessage>& flow, const ScanConfig& cfg) {
  std::vector<Finding> findings;
  for (std::size_t i = 0; i < flow.size(); ++i) {
    ScanReport report = scan_message(flow[i], cfg);
    for (Finding& f : report.findings) {
      f.message_index = i;
      findings.push_back(std::move(f));
    }
  }
  return ScanReport::from_findings(std::move(findings));
}

}  // namespace sipsteg
