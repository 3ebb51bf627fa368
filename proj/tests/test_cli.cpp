#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "sipsteg/cli.hpp"

using namespace sipsteg;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("sipsteg-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = path / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string name(const std::string& n) const { return (path / n).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("cli: capacity --paper prints the reference table") {
  const auto result = run_cli({"capacity", "--paper", "--format", "machine"});
  CHECK(result.exit_code == 0);
  CHECK(result.out ==
        "transport_stego=80\n"
        "sip_tokens=480\n"
        "sip_security=800\n"
        "sdp_stego=960\n"
        "other_sip=40\n"
        "total=2360\n");

  const auto text = run_cli({"capacity", "--paper", "--format", "text"});
  CHECK(text.exit_code == 0);
  CHECK(text.out.find("2360") != std::string::npos);
}

TEST_CASE("cli: measured capacity honours the channel selection") {
  const auto none = run_cli({"capacity", "--scenario", "default", "--channels", "none"});
  CHECK(none.exit_code == 0);
  CHECK(none.out.find("total=0\n") != std::string::npos);

  const auto sig = run_cli(
      {"capacity", "--scenario", "smime", "--channels", "smime_signature"});
  CHECK(sig.exit_code == 0);
  CHECK(sig.out.find("smime_signature=320\n") != std::string::npos);
}

TEST_CASE("cli: single-message embed and extract round trip") {
  TempDir tmp;
  const std::string carrier = tmp.file("carrier.sip", fixtures::sdp_invite());
  const std::string payload = tmp.file("payload.bin", std::string("\xde\xad\xbe\xef", 4));
  const std::string embedded = tmp.name("embedded.sip");

  const auto embed = run_cli({"embed", "--in", carrier, "--payload", payload, "--out",
                              embedded, "--channels", "tag,branch"});
  CAPTURE(embed.err);
  REQUIRE(embed.exit_code == 0);
  CHECK(embed.out.find("branch=96\n") != std::string::npos);
  CHECK(embed.out.find("tag=32\n") != std::string::npos);
  CHECK(embed.out.find("payload_bits=32\n") != std::string::npos);

  const SipMessage msg = parse_message(slurp(embedded));
  CHECK(msg.find_header("via")->param("branch")->starts_with("z9hG4bK"));

  const std::string recovered = tmp.name("recovered.bin");
  const auto extract = run_cli({"extract", "--in", embedded, "--out", recovered,
                                "--channels", "tag,branch"});
  REQUIRE(extract.exit_code == 0);
  CHECK(extract.out.find("bits=128\n") != std::string::npos);
  // branch carries the payload prefix; 128 bits -> 16 bytes, zero padded.
  const std::string bytes = slurp(recovered);
  REQUIRE(bytes.size() == 16);
  CHECK(bytes.substr(0, 4) == std::string("\xde\xad\xbe\xef", 4));
}

TEST_CASE("cli: embed with an empty payload zero-fills the fields") {
  TempDir tmp;
  const std::string carrier = tmp.file("carrier.sip", fixtures::sdp_invite());
  const std::string payload = tmp.file("payload.bin", "");
  const std::string embedded = tmp.name("embedded.sip");
  const auto result = run_cli({"embed", "--in", carrier, "--payload", payload, "--out",
                               embedded, "--channels", "tag"});
  REQUIRE(result.exit_code == 0);
  CHECK(parse_message(slurp(embedded)).find_header("from")->param("tag") == "00000000");
}

TEST_CASE("cli: oversized payload exits 3") {
  TempDir tmp;
  const std::string carrier = tmp.file("carrier.sip", fixtures::sdp_invite());
  const std::string payload = tmp.file("payload.bin", std::string(1024, 'x'));
  const auto result = run_cli({"embed", "--in", carrier, "--payload", payload, "--out",
                               tmp.name("o.sip"), "--channels", "max_forwards"});
  CHECK(result.exit_code == 3);
}

TEST_CASE("cli: channel absent exits 4") {
  TempDir tmp;
  const std::string carrier = tmp.file("carrier.sip", fixtures::minimal_options());
  const auto result = run_cli({"extract", "--in", carrier, "--out", tmp.name("p.bin"),
                               "--channels", "branch"});
  CHECK(result.exit_code == 4);
}

TEST_CASE("cli: extraction failures exit 5") {
  TempDir tmp;
  const std::string carrier = tmp.file("carrier.sip", fixtures::sdp_invite());
  // The fixture's tag is not hex-shaped.
  const auto result = run_cli({"extract", "--in", carrier, "--out", tmp.name("p.bin"),
                               "--channels", "tag"});
  CHECK(result.exit_code == 5);

  // The hex-shaped Call-ID local part decodes fine.
  const auto ok = run_cli({"extract", "--in", carrier, "--out", tmp.name("q.bin"),
                           "--channels", "call_id"});
  CHECK(ok.exit_code == 0);
}

TEST_CASE("cli: malformed carrier exits 2") {
  TempDir tmp;
  const std::string carrier = tmp.file("broken.sip", "not a sip message");
  const auto result = run_cli({"scan", "--in", carrier});
  CHECK(result.exit_code == 2);
}

TEST_CASE("cli: unknown channel id is rejected before any work") {
  TempDir tmp;
  const auto result = run_cli({"extract", "--in", tmp.name("missing.sip"), "--out",
                               tmp.name("p.bin"), "--channels", "bogus"});
  CHECK(result.exit_code == 64);
}

TEST_CASE("cli: missing input file exits 66") {
  TempDir tmp;
  const auto result = run_cli({"scan", "--in", tmp.name("does-not-exist.sip")});
  CHECK(result.exit_code == 66);
}

TEST_CASE("cli: flow embed/extract round trip over a file") {
  TempDir tmp;
  std::string payload_bytes;
  for (int i = 0; i < 200; ++i) payload_bytes += static_cast<char>((i * 31 + 7) & 0xFF);
  const std::string payload = tmp.file("payload.bin", payload_bytes);
  const std::string flow = tmp.name("flow.sip");

  const auto embed = run_cli({"flow", "embed", "--scenario", "smime", "--payload", payload,
                              "--out", flow, "--channels", "all"});
  CAPTURE(embed.err);
  REQUIRE(embed.exit_code == 0);
  CHECK(embed.out.find("messages=5\n") != std::string::npos);
  CHECK(embed.out.find("payload_bits=1600\n") != std::string::npos);

  const std::string recovered = tmp.name("recovered.bin");
  const auto extract = run_cli({"flow", "extract", "--in", flow, "--out", recovered,
                                "--channels", "all"});
  CAPTURE(extract.err);
  REQUIRE(extract.exit_code == 0);
  CHECK(slurp(recovered) == payload_bytes);
}

TEST_CASE("cli: empty flow payload still produces a parse-clean flow file") {
  TempDir tmp;
  const std::string payload = tmp.file("payload.bin", "");
  const std::string flow = tmp.name("flow.sip");
  const auto embed = run_cli({"flow", "embed", "--payload", payload, "--out", flow});
  REQUIRE(embed.exit_code == 0);
  const auto blobs = split_flow(slurp(flow));
  REQUIRE(blobs.size() == 5);
  for (const auto& blob : blobs) {
    CHECK(serialize_message(parse_message(blob)) == blob);
  }
}

TEST_CASE("cli: mismatched flow channel sets exit 5") {
  TempDir tmp;
  const std::string payload = tmp.file("payload.bin", "xy");
  const std::string flow = tmp.name("flow.sip");
  REQUIRE(run_cli({"flow", "embed", "--payload", payload, "--out", flow, "--channels",
                   "whitespace"})
              .exit_code == 0);
  const auto result = run_cli({"flow", "extract", "--in", flow, "--out",
                               tmp.name("p.bin"), "--channels", "tag"});
  CHECK(result.exit_code == 5);
}

TEST_CASE("cli: scan distinguishes clean and embedded flows") {
  TempDir tmp;
  const std::string clean_flow = tmp.name("clean.sip");
  REQUIRE(run_cli({"flow", "template", "--out", clean_flow}).exit_code == 0);
  const auto clean = run_cli({"scan", "--in", clean_flow});
  CHECK(clean.exit_code == 0);

  const std::string payload = tmp.file("payload.bin", "hi");
  const std::string embedded_flow = tmp.name("embedded.sip");
  REQUIRE(run_cli({"flow", "embed", "--payload", payload, "--out", embedded_flow,
                   "--channels", "case_modulation"})
              .exit_code == 0);
  const auto dirty = run_cli({"scan", "--in", embedded_flow});
  CHECK(dirty.exit_code == 1);
  CHECK(dirty.out.find("finding case_modulation") != std::string::npos);
}

TEST_CASE("cli: scanning the whitespace fixture finds the runs") {
  TempDir tmp;
  const std::string carrier = tmp.file("ws.sip", fixtures::whitespace_invite());
  const auto result = run_cli({"scan", "--in", carrier, "--format", "machine"});
  CHECK(result.exit_code == 1);
  CHECK(result.out.find("finding whitespace") != std::string::npos);
}

TEST_CASE("cli: config file keys and --set overrides") {
  TempDir tmp;
  const std::string config = tmp.file("sipsteg.conf", "tag_len=12\nhost_name=pc.example.org\n");
  const std::string carrier = tmp.file("carrier.sip", fixtures::sdp_invite());
  const std::string payload = tmp.file("payload.bin", "abcdef");
  const std::string embedded = tmp.name("embedded.sip");

  REQUIRE(run_cli({"embed", "--in", carrier, "--payload", payload, "--out", embedded,
                   "--channels", "tag,call_id", "--config", config})
              .exit_code == 0);
  SipMessage msg = parse_message(slurp(embedded));
  CHECK(msg.find_header("from")->param("tag")->size() == 12);
  CHECK(msg.find_header("call-id")->value.find("@pc.example.org") != std::string::npos);

  const std::string short_payload = tmp.file("short.bin", "abcd");
  REQUIRE(run_cli({"embed", "--in", carrier, "--payload", short_payload, "--out", embedded,
                   "--channels", "tag", "--config", config, "--set", "tag_len=8"})
              .exit_code == 0);
  CHECK(parse_message(slurp(embedded)).find_header("from")->param("tag")->size() == 8);

  const auto bad = run_cli({"capacity", "--paper", "--set", "no_such_key=1"});
  CHECK(bad.exit_code == 64);
}

TEST_CASE("cli: scenarios load from description files") {
  TempDir tmp;
  const std::string scenario = tmp.file("calls.scn",
                                        "# three messages, one SDP body\n"
                                        "INVITE sdp\n"
                                        "OPTIONS\n"
                                        "BYE\n");
  const auto result = run_cli({"capacity", "--scenario", scenario, "--channels", "cseq"});
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("cseq=31\n") != std::string::npos);

  const std::string payload = tmp.file("p.bin", "ok");
  const std::string flow = tmp.name("flow.sip");
  REQUIRE(run_cli({"flow", "embed", "--scenario", scenario, "--payload", payload, "--out",
                   flow})
              .exit_code == 0);
  CHECK(split_flow(slurp(flow)).size() == 3);
}

TEST_CASE("cli: decoy fill requires a seed and is reproducible") {
  TempDir tmp;
  const std::string flow_a = tmp.name("a.sip");
  const std::string flow_b = tmp.name("b.sip");
  const std::string flow_c = tmp.name("c.sip");

  const auto no_seed = run_cli({"flow", "template", "--out", flow_a, "--fill-random"});
  CHECK(no_seed.exit_code == 64);

  REQUIRE(run_cli({"flow", "template", "--out", flow_a, "--fill-random", "--seed", "9"})
              .exit_code == 0);
  REQUIRE(run_cli({"flow", "template", "--out", flow_b, "--fill-random", "--seed", "9"})
              .exit_code == 0);
  REQUIRE(run_cli({"flow", "template", "--out", flow_c, "--fill-random", "--seed", "10"})
              .exit_code == 0);
  CHECK(slurp(flow_a) == slurp(flow_b));
  CHECK(slurp(flow_a) != slurp(flow_c));
}

TEST_CASE("cli: help is available") {
  const auto result = run_cli({"--help"});
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("embed") != std::string::npos);
}
