#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sipsteg/errors.hpp"
#include "sipsteg/message.hpp"

namespace sipsteg {

/// Per-channel tuning knobs. Field names double as the config-file keys.
struct ChannelConfig {
  // Token lengths, in characters of the channel's alphabet.
  std::size_t branch_len = 16;
  std::size_t tag_len = 8;
  std::size_t callid_len = 16;
  std::size_t boundary_len = 16;
  std::size_t freetext_len = 10;
  std::size_t sdp_sessid_digits = 10;
  std::size_t sdp_sessname_len = 10;
  std::size_t sdp_key_len = 28;

  /// Trailing SP/HT run written per line by the whitespace channel.
  std::size_t ws_run_len = 4;

  /// Headers the reorder channel may permute. Decoding needs both sides to
  /// agree on this set; the reference order is alphabetical.
  std::vector<std::string> reorderable_headers = default_reorderable_headers();

  /// Headers the case channel modulates; empty optional means every header.
  std::optional<std::vector<std::string>> case_headers;

  /// Bits carried in place of the signature blob (160 matches a SHA-1 sized
  /// signature digest).
  std::size_t signature_bits = 160;

  std::string host_name = "atlanta.example.com";

  /// Whether free-text embedding may add absent Subject / Organization /
  /// User-Agent headers.
  bool freetext_add_missing = true;

  void validate() const {
    if (branch_len < 1 || tag_len < 1 || callid_len < 1 || boundary_len < 1 ||
        freetext_len < 1 || sdp_sessid_digits < 1 || sdp_sessname_len < 1 ||
        sdp_key_len < 1 || ws_run_len < 1) {
      throw ConfigViolation("all channel lengths must be >= 1");
    }
    if (reorderable_headers.size() < 2) {
      throw ConfigViolation("reorderable set needs >= 2 headers");
    }
    if (reorderable_headers.size() > 20) {
      throw ConfigViolation("reorderable set larger than 20 headers");
    }
    if (signature_bits == 0 || signature_bits % 8 != 0) {
      throw ConfigViolation("signature_bits must be a positive multiple of 8");
    }
    if (host_name.empty()) throw ConfigViolation("host_name must not be empty");
  }
};

/// Warden-side thresholds. Defaults are calibrated so the unmodified
/// reference messages scan without token findings.
struct ScanConfig {
  /// Flag a token field when chi-square per degree of freedom against the
  /// uniform distribution over its alphabet exceeds this.
  double chi2_threshold = 4.0;

  std::size_t tag_len_min = 8, tag_len_max = 24;
  std::size_t branch_len_min = 4, branch_len_max = 32;
  std::size_t callid_len_min = 8, callid_len_max = 40;
  std::size_t boundary_len_expected = 16;
  long max_forwards_expected = 70;

  /// Minimum sample size before the chi-square heuristic speaks at all.
  std::size_t chi2_min_chars = 8;

  std::vector<std::string> reorderable_headers = default_reorderable_headers();
};

namespace detail {

inline std::vector<std::string> split_csv(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    std::string_view item = text.substr(
        pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
    while (!item.empty() && is_linear_ws(item.front())) item.remove_prefix(1);
    while (!item.empty() && is_linear_ws(item.back())) item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::size_t parse_size(const std::string& key, const std::string& value) {
  try {
    const long long v = std::stoll(value);
    if (v < 0) throw ConfigViolation(key + " must be non-negative");
    return static_cast<std::size_t>(v);
  } catch (const ConfigViolation&) {
    throw;
  } catch (...) {
    throw ConfigViolation("bad integer for " + key + ": " + value);
  }
}

}  // namespace detail

/// Parses the line-oriented key=value config format into both config
/// structures. Unknown keys are rejected so typos do not silently change a
/// channel's framing between sender and receiver.
inline void load_config_text(std::string_view text, ChannelConfig& channels,
                             ScanConfig& scan) {
  std::istringstream stream{std::string(text)};
  std::string line;
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view = line;
    while (!view.empty() && is_linear_ws(view.front())) view.remove_prefix(1);
    if (view.empty() || view.front() == '#') continue;
    const std::size_t eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigViolation("config line without '=': " + line);
    }
    std::string key(view.substr(0, eq));
    std::string value(view.substr(eq + 1));
    while (!key.empty() && is_linear_ws(key.back())) key.pop_back();

    if (key == "branch_len") channels.branch_len = detail::parse_size(key, value);
    else if (key == "tag_len") channels.tag_len = detail::parse_size(key, value);
    else if (key == "callid_len") channels.callid_len = detail::parse_size(key, value);
    else if (key == "boundary_len") channels.boundary_len = detail::parse_size(key, value);
    else if (key == "freetext_len") channels.freetext_len = detail::parse_size(key, value);
    else if (key == "sdp_sessid_digits") channels.sdp_sessid_digits = detail::parse_size(key, value);
    else if (key == "sdp_sessname_len") channels.sdp_sessname_len = detail::parse_size(key, value);
    else if (key == "sdp_key_len") channels.sdp_key_len = detail::parse_size(key, value);
    else if (key == "ws_run_len") channels.ws_run_len = detail::parse_size(key, value);
    else if (key == "signature_bits") channels.signature_bits = detail::parse_size(key, value);
    else if (key == "host_name") channels.host_name = value;
    else if (key == "freetext_add_missing") channels.freetext_add_missing = (value == "true" || value == "1");
    else if (key == "reorderable_headers") {
      channels.reorderable_headers = detail::split_csv(value);
      scan.reorderable_headers = channels.reorderable_headers;
    } else if (key == "case_headers") {
      if (value == "all") channels.case_headers.reset();
      else channels.case_headers = detail::split_csv(value);
    } else if (key == "chi2_threshold") {
      try {
        scan.chi2_threshold = std::stod(value);
      } catch (...) {
        throw ConfigViolation("bad number for chi2_threshold: " + value);
      }
    }
    else if (key == "chi2_min_chars") scan.chi2_min_chars = detail::parse_size(key, value);
    else if (key == "tag_len_min") scan.tag_len_min = detail::parse_size(key, value);
    else if (key == "tag_len_max") scan.tag_len_max = detail::parse_size(key, value);
    else if (key == "branch_len_min") scan.branch_len_min = detail::parse_size(key, value);
    else if (key == "branch_len_max") scan.branch_len_max = detail::parse_size(key, value);
    else if (key == "callid_len_min") scan.callid_len_min = detail::parse_size(key, value);
    else if (key == "callid_len_max") scan.callid_len_max = detail::parse_size(key, value);
    else if (key == "boundary_len_expected") scan.boundary_len_expected = detail::parse_size(key, value);
    else if (key == "max_forwards_expected") {
      scan.max_forwards_expected = static_cast<long>(detail::parse_size(key, value));
    }
    else throw ConfigViolation("unknown config key: " + key);
  }
  channels.validate();
}

}  // namespace sipsteg
