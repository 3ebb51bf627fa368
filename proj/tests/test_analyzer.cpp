#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>

#include "fixtures.hpp"
#include "generators.hpp"
#include "sipsteg/analyzer.hpp"
#include "sipsteg/callflow.hpp"

using namespace sipsteg;

namespace {
const ScanConfig kScan;
const ChannelConfig kChannels;
}  // namespace

TEST_CASE("whitespace scanner flags trailing runs line by line") {
  const SipMessage msg = parse_message(fixtures::whitespace_invite());
  const auto findings = scan_whitespace(msg);
  REQUIRE(findings.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(findings[i].line_index == i + 1);
    CHECK(findings[i].channel_suspected == ChannelId::whitespace);
    CHECK(findings[i].severity == Severity::high);  // every run here has a tab
    CHECK(findings[i].evidence.size() <= 80);
  }

  CHECK(scan_whitespace(canonicalize(msg)).empty());

  const SipMessage spaces = parse_message("OPTIONS sip:x SIP/2.0\r\nVia: v    \r\n\r\n");
  const auto sp_findings = scan_whitespace(spaces);
  REQUIRE(sp_findings.size() == 1);
  CHECK(sp_findings[0].severity == Severity::medium);
  CHECK(sp_findings[0].line_index == 2);
}

TEST_CASE("case scanner flags monocase spellings only") {
  const SipMessage shouty = parse_message("OPTIONS sip:x SIP/2.0\r\nFROM: a\r\n\r\n");
  const auto findings = scan_case(shouty);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].severity == Severity::high);
  CHECK(findings[0].evidence == "FROM");

  CHECK(scan_case(parse_message("OPTIONS sip:x SIP/2.0\r\nFrom: a\r\n\r\n")).empty());
  CHECK(scan_case(parse_message(fixtures::sdp_invite())).empty());

  // A fully modulated message yields one finding per header.
  const auto embedded =
      channel(ChannelId::case_modulation)
          .embed(parse_message(fixtures::sdp_invite()), BitString::from_uint(0x155, 9),
                 kChannels);
  CHECK(scan_case(embedded.message).size() == 9);
}

TEST_CASE("order scanner reports the observed permutation index") {
  const SipMessage swapped = parse_message(
      "OPTIONS sip:x SIP/2.0\r\nCSeq: 1 OPTIONS\r\nCall-ID: a@b\r\n\r\n");
  const auto findings = scan_order(swapped, kScan.reorderable_headers);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].channel_suspected == ChannelId::header_reorder);
  CHECK(findings[0].evidence.find("index 1") != std::string::npos);

  const SipMessage ordered = parse_message(
      "OPTIONS sip:x SIP/2.0\r\nCall-ID: a@b\r\nCSeq: 1 OPTIONS\r\n\r\n");
  CHECK(scan_order(ordered, kScan.reorderable_headers).empty());

  // The reported index matches the reorder channel's own encoding.
  std::mt19937_64 rng(0x5eed40);
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t value = 1 + generators::pick(rng, 511);
    const auto embedded = channel(ChannelId::header_reorder)
                              .embed(parse_message(fixtures::sdp_invite()),
                                     BitString::from_uint(value, 9), kChannels);
    const auto order_findings = scan_order(embedded.message, kScan.reorderable_headers);
    REQUIRE(order_findings.size() == 1);
    CHECK(order_findings[0].evidence.find("index " + std::to_string(value) + " ") !=
          std::string::npos);
  }
}

TEST_CASE("token scanner: Max-Forwards away from 70") {
  SipMessage msg = parse_message(fixtures::sdp_invite());
  *msg.find_header("max-forwards") = msg.find_header("max-forwards")->with_value("63");
  const auto findings = scan_tokens(msg, kScan);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].channel_suspected == ChannelId::max_forwards);
  CHECK(findings[0].severity == Severity::low);
  CHECK(findings[0].evidence == "Max-Forwards: 63");
}

TEST_CASE("token scanner: fixtures pass the calibrated thresholds") {
  CHECK(scan_tokens(parse_message(fixtures::sdp_invite()), kScan).empty());
  CHECK(scan_tokens(parse_message(fixtures::smime_invite()), kScan).empty());
  CHECK(scan_tokens(parse_message(fixtures::whitespace_invite()), kScan).empty());
}

TEST_CASE("token scanner: degenerate histograms are flagged") {
  const auto embedded = channel(ChannelId::tag)
                            .embed(parse_message(fixtures::sdp_invite()), BitString{},
                                   kChannels);  // tag becomes 00000000
  const auto findings = scan_tokens(embedded.message, kScan);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].channel_suspected == ChannelId::tag);
  CHECK(findings[0].evidence.find("chi2") != std::string::npos);
}

TEST_CASE("token scanner: implausible lengths are flagged") {
  SipMessage msg = parse_message(fixtures::sdp_invite());
  *msg.find_header("from") = msg.find_header("from")->with_param("tag", "abc1");
  const auto findings = scan_tokens(msg, kScan);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].evidence.find("length 4") != std::string::npos);

  ScanConfig strict = kScan;
  strict.boundary_len_expected = 20;
  const auto boundary_findings = scan_tokens(parse_message(fixtures::smime_invite()), strict);
  REQUIRE(boundary_findings.size() == 1);
  CHECK(boundary_findings[0].channel_suspected == ChannelId::smime_boundary);
}

TEST_CASE("canonical template flows scan clean") {
  for (const auto& scenario : {default_scenario(), smime_scenario()}) {
    const auto flow = scenario_messages(scenario, kChannels);
    const ScanReport report = scan_flow(flow, kScan);
    CAPTURE(scenario.name, report.to_machine());
    CHECK(report.clean);
    CHECK(report.findings.empty());
  }
}

TEST_CASE("case-modulated flows are flagged on every message") {
  std::mt19937_64 rng(0x5eed41);
  const std::vector<ChannelId> case_only = {ChannelId::case_modulation};
  const auto flow = flow_embed(default_scenario(), generators::random_bits(rng, 20),
                               kChannels, case_only);
  const ScanReport report = scan_flow(flow, kScan);
  CHECK_FALSE(report.clean);
  for (std::size_t i = 0; i < flow.size(); ++i) {
    bool found = false;
    for (const auto& f : report.findings) {
      if (f.message_index == i && f.channel_suspected == ChannelId::case_modulation) {
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("token-only channels leave whitespace/case/order scanners silent") {
  std::mt19937_64 rng(0x5eed42);
  const std::vector<ChannelId> token_channels = {ChannelId::cseq, ChannelId::tag,
                                                 ChannelId::branch};
  for (int i = 0; i < 10; ++i) {
    const auto flow = flow_embed(default_scenario(), generators::random_bits(rng, 150),
                                 kChannels, token_channels);
    for (const auto& msg : flow) {
      CHECK(scan_whitespace(msg).empty());
      CHECK(scan_case(msg).empty());
      CHECK(scan_order(msg, kScan.reorderable_headers).empty());
    }
  }
}

TEST_CASE("canonicalized messages scan clean on the structural scanners") {
  std::mt19937_64 rng(0x5eed43);
  const auto flow = flow_embed(default_scenario(), generators::random_bits(rng, 500),
                               kChannels, canonical_channel_order());
  for (const auto& msg : flow) {
    const SipMessage canon = canonicalize(msg, kScan.reorderable_headers);
    CHECK(scan_whitespace(canon).empty());
    CHECK(scan_case(canon).empty());
    CHECK(scan_order(canon, kScan.reorderable_headers).empty());
  }
}

TEST_CASE("scan reports aggregate counts and formats") {
  const SipMessage msg = parse_message(fixtures::whitespace_invite());
  const ScanReport report = scan_message(msg, kScan);
  CHECK_FALSE(report.clean);
  CHECK(report.per_channel_counts.at(ChannelId::whitespace) == 4);

  const std::string machine = report.to_machine();
  CHECK(machine.find("finding whitespace msg=0 line=1 sev=high") != std::string::npos);
  const std::string text = report.to_text();
  CHECK(text.find("finding(s)") != std::string::npos);

  const ScanReport empty = ScanReport::from_findings({});
  CHECK(empty.clean);
  CHECK(empty.to_machine().empty());
}

TEST_CASE("scanner determinism") {
  const SipMessage msg = parse_message(fixtures::whitespace_invite());
  CHECK(scan_message(msg, kScan).to_machine() == scan_message(msg, kScan).to_machine());
}
