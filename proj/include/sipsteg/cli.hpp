#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sipsteg/analyzer.hpp"
#include "sipsteg/callflow.hpp"
#include "sipsteg/capacity.hpp"
#include "sipsteg/channels.hpp"
#include "sipsteg/config.hpp"
#include "sipsteg/message.hpp"

namespace sipsteg::cli {

/// Raised for unreadable/unwritable paths; mapped to exit code 66.
class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::vector<ChannelId> parse_channels(const std::string& csv) {
  if (csv == "all") return canonical_channel_order();
  if (csv == "none") return {};
  std::vector<ChannelId> out;
  for (const auto& name : sipsteg::detail::split_csv(csv)) {
    const auto id = channel_from_string(name);
    if (!id) throw ConfigViolation("unknown channel id: " + name);
    out.push_back(*id);
  }
  return out;
}

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value pairs applied after the file

  ChannelConfig channels;
  ScanConfig scan;

  void load() {
    if (!config_path.empty()) load_config_text(read_file(config_path), channels, scan);
    std::string joined;
    for (const auto& kv : overrides) joined += kv + "\n";
    if (!joined.empty()) load_config_text(joined, channels, scan);
    channels.validate();
  }
};

inline void add_config_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "key=value config file");
  cmd->add_option("--set", opt.overrides,
                  "config override (key=value), applied after --config");
}

inline CallScenario resolve_scenario(const std::string& name_or_path) {
  if (name_or_path == "default") return default_scenario();
  if (name_or_path == "smime") return smime_scenario();
  return load_scenario_text(read_file(name_or_path), name_or_path);
}

inline BitString payload_from_file(const std::string& path) {
  const std::string bytes = read_file(path);
  return BitString::from_bytes(
      {reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()});
}

inline std::string bits_to_file_bytes(const BitString& bits) {
  const auto bytes = bits.to_bytes();
  return std::string(bytes.begin(), bytes.end());
}

inline std::vector<SipMessage> parse_flow_file(const std::string& bytes) {
  std::vector<SipMessage> out;
  for (const auto& blob : split_flow(bytes)) out.push_back(parse_message(blob));
  return out;
}

}  // namespace detail

/// Runs the command line. Arguments exclude the program name. Exit codes:
/// 0 ok (scan: clean), 1 scan findings, 2 malformed carrier, 3 payload
/// exceeds capacity, 4 channel carrier absent, 5 extraction decode failure,
/// 64 usage or config error, 66 file I/O error.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SIP/SDP covert-channel toolkit: embed, extract, measure and detect"};
  app.require_subcommand(1);

  detail::Options opt;

  // --- embed ---------------------------------------------------------------
  auto* embed = app.add_subcommand("embed", "embed payload bits into one carrier message");
  std::string embed_in, embed_payload, embed_out, embed_channels;
  embed->add_option("--in", embed_in, "carrier message file")->required();
  embed->add_option("--payload", embed_payload, "payload file (bytes, MSB first)")->required();
  embed->add_option("--out", embed_out, "output message file")->required();
  embed->add_option("--channels", embed_channels, "channel ids (csv) or 'all'")->required();
  detail::add_config_options(embed, opt);
  embed->callback([&] {
    const auto channels = detail::parse_channels(embed_channels);
    opt.load();
    SipMessage msg = parse_message(detail::read_file(embed_in));
    const BitString payload = detail::payload_from_file(embed_payload);
    std::size_t pos = 0;
    std::size_t carrier_bits = 0;
    for (ChannelId id : ordered_channels(channels)) {
      const Channel& ch = channel(id);
      const std::size_t cap = ch.capacity(msg, opt.channels);
      const BitString remaining =
          pos < payload.size() ? payload.slice(pos, payload.size() - pos) : BitString{};
      EmbedResult result = ch.embed(msg, remaining, opt.channels);
      msg = std::move(result.message);
      pos += result.bits_consumed;
      carrier_bits += cap;
      out << to_string(id) << "=" << cap << "\n";
    }
    if (pos < payload.size()) throw PayloadExceedsCapacity(payload.size(), carrier_bits);
    out << "payload_bits=" << payload.size() << "\n";
    detail::write_file(embed_out, serialize_message(msg));
  });

  // --- extract ---------------------------------------------------------------
  auto* extract = app.add_subcommand("extract", "extract raw channel bits from one message");
  std::string extract_in, extract_out, extract_channels;
  extract->add_option("--in", extract_in, "carrier message file")->required();
  extract->add_option("--out", extract_out, "output payload file")->required();
  extract->add_option("--channels", extract_channels, "channel ids (csv) or 'all'")->required();
  detail::add_config_options(extract, opt);
  extract->callback([&] {
    const auto channels = detail::parse_channels(extract_channels);
    opt.load();
    const SipMessage msg = parse_message(detail::read_file(extract_in));
    BitString bits;
    for (ChannelId id : ordered_channels(channels)) {
      bits.append(channel(id).extract(msg, opt.channels));
    }
    out << "bits=" << bits.size() << "\n";
    detail::write_file(extract_out, detail::bits_to_file_bytes(bits));
  });

  // --- capacity --------------------------------------------------------------
  auto* capacity = app.add_subcommand("capacity", "report per-channel and total covert capacity");
  bool capacity_paper = false;
  std::string capacity_scenario = "default", capacity_channels = "all", capacity_format = "machine";
  capacity->add_flag("--paper", capacity_paper, "reference per-method budget table");
  capacity->add_option("--scenario", capacity_scenario, "scenario name (default|smime) or file");
  capacity->add_option("--channels", capacity_channels, "channel ids (csv), 'all' or 'none'");
  capacity->add_option("--format", capacity_format, "text|machine")
      ->check(CLI::IsMember({"text", "machine"}));
  detail::add_config_options(capacity, opt);
  capacity->callback([&] {
    const auto channels = detail::parse_channels(capacity_channels);
    opt.load();
    CapacityReport report;
    if (capacity_paper) {
      report = compute_total(paper_scenario());
    } else {
      const CallScenario scenario = detail::resolve_scenario(capacity_scenario);
      report = measured_scenario(scenario_messages(scenario, opt.channels), opt.channels,
                                 channels);
    }
    out << (capacity_format == "text" ? report.to_text() : report.to_machine());
  });

  // --- scan ------------------------------------------------------------------
  auto* scan = app.add_subcommand("scan", "scan a message or flow file for channel fingerprints");
  std::string scan_in, scan_format = "machine";
  scan->add_option("--in", scan_in, "message or flow file")->required();
  scan->add_option("--format", scan_format, "text|machine")
      ->check(CLI::IsMember({"text", "machine"}));
  detail::add_config_options(scan, opt);
  int scan_exit = 0;
  scan->callback([&] {
    opt.load();
    const std::string bytes = detail::read_file(scan_in);
    ScanReport report;
    if (bytes.find(kFlowSeparator) != std::string::npos) {
      report = scan_flow(detail::parse_flow_file(bytes), opt.scan);
    } else {
      report = scan_message(parse_message(bytes), opt.scan);
    }
    out << (scan_format == "text" ? report.to_text() : report.to_machine());
    scan_exit = report.clean ? 0 : 1;
  });

  // --- flow ------------------------------------------------------------------
  auto* flow = app.add_subcommand("flow", "multi-message operations over flow files");
  flow->require_subcommand(1);

  auto* fembed = flow->add_subcommand("embed", "embed a framed payload across a scenario");
  std::string fembed_scenario = "default", fembed_payload, fembed_out, fembed_channels = "all";
  fembed->add_option("--scenario", fembed_scenario, "scenario name or file");
  fembed->add_option("--payload", fembed_payload, "payload file")->required();
  fembed->add_option("--out", fembed_out, "output flow file")->required();
  fembed->add_option("--channels", fembed_channels, "channel ids (csv) or 'all'");
  detail::add_config_options(fembed, opt);
  fembed->callback([&] {
    const auto channels = detail::parse_channels(fembed_channels);
    opt.load();
    const CallScenario scenario = detail::resolve_scenario(fembed_scenario);
    const BitString payload = detail::payload_from_file(fembed_payload);
    const auto messages = flow_embed(scenario, payload, opt.channels, channels);
    std::vector<std::string> blobs;
    blobs.reserve(messages.size());
    for (const auto& m : messages) blobs.push_back(serialize_message(m));
    detail::write_file(fembed_out, join_flow(blobs));
    out << "messages=" << messages.size() << "\n";
    out << "payload_bits=" << payload.size() << "\n";
    out << "capacity_bits=" << flow_capacity_bits(scenario, opt.channels, channels) << "\n";
  });

  auto* fextract = flow->add_subcommand("extract", "recover the framed payload from a flow file");
  std::string fextract_in, fextract_out, fextract_channels = "all";
  fextract->add_option("--in", fextract_in, "flow file")->required();
  fextract->add_option("--out", fextract_out, "output payload file")->required();
  fextract->add_option("--channels", fextract_channels, "channel ids (csv) or 'all'");
  detail::add_config_options(fextract, opt);
  fextract->callback([&] {
    const auto channels = detail::parse_channels(fextract_channels);
    opt.load();
    const auto messages = detail::parse_flow_file(detail::read_file(fextract_in));
    const BitString payload = flow_extract(messages, opt.channels, channels);
    out << "payload_bits=" << payload.size() << "\n";
    detail::write_file(fextract_out, detail::bits_to_file_bytes(payload));
  });

  auto* ftemplate = flow->add_subcommand("template", "write a scenario's carrier messages");
  std::string ftemplate_scenario = "default", ftemplate_out, ftemplate_channels = "all";
  bool fill_random = false;
  std::uint64_t seed = 0;
  ftemplate->add_option("--scenario", ftemplate_scenario, "scenario name or file");
  ftemplate->add_option("--out", ftemplate_out, "output flow file")->required();
  ftemplate->add_option("--channels", ftemplate_channels,
                        "channels filled by --fill-random");
  auto* fill_flag = ftemplate->add_flag("--fill-random", fill_random,
                                        "fill covert fields with seeded decoy bits");
  ftemplate->add_option("--seed", seed, "decoy PRNG seed (required with --fill-random)")
      ->needs(fill_flag);
  detail::add_config_options(ftemplate, opt);
  bool seed_given = false;
  ftemplate->callback([&] {
    const auto channels = detail::parse_channels(ftemplate_channels);
    opt.load();
    seed_given = ftemplate->count("--seed") > 0;
    if (fill_random && !seed_given) {
      throw ConfigViolation("--fill-random requires --seed for reproducibility");
    }
    const CallScenario scenario = detail::resolve_scenario(ftemplate_scenario);
    const auto messages = fill_random
                              ? flow_fill_random(scenario, opt.channels, channels, seed)
                              : scenario_messages(scenario, opt.channels);
    std::vector<std::string> blobs;
    blobs.reserve(messages.size());
    for (const auto& m : messages) blobs.push_back(serialize_message(m));
    detail::write_file(ftemplate_out, join_flow(blobs));
    out << "messages=" << messages.size() << "\n";
  });

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
    return scan_exit;
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const MalformedMessage& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DuplicateReorderableHeader& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const PayloadExceedsCapacity& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const PayloadTooLong& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const ChannelAbsent& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const SymbolNotInAlphabet& e) {
    err << "error: " << e.what() << "\n";
    return 5;
  } catch (const TruncatedStream& e) {
    err << "error: " << e.what() << "\n";
    return 5;
  } catch (const ConfigViolation& e) {
    err << "error: " << e.what() << "\n";
    return 64;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 66;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 70;
  }
}

}  // namespace sipsteg::cli
