#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sipsteg/capacity.hpp"
#include "sipsteg/channels.hpp"
#include "sipsteg/config.hpp"
#include "sipsteg/message.hpp"

namespace sipsteg {

struct MessageTemplate {
  std::string method;
  bool has_sdp = false;
  bool has_smime = false;
};

/// An ordered caller-to-callee message schedule. Responses flow the other
/// way and are not part of the one-direction accounting.
struct CallScenario {
  std::string name;
  std::vector<MessageTemplate> messages;
};

/// Five messages: call setup, an in-call OPTIONS exchange and the teardown.
/// INVITE and the first OPTIONS carry an SDP body.
inline CallScenario default_scenario() {
  return {"default",
          {{"INVITE", true, false},
           {"ACK", false, false},
           {"OPTIONS", true, false},
           {"OPTIONS", false, false},
           {"BYE", false, false}}};
}

/// Same shape, but INVITE and the first OPTIONS carry an S/MIME
/// multipart/signed body (the session description rides encrypted inside
/// it, so the plain SDP channels are unavailable on those messages).
inline CallScenario smime_scenario() {
  return {"smime",
          {{"INVITE", false, true},
           {"ACK", false, false},
           {"OPTIONS", false, true},
           {"OPTIONS", false, false},
           {"BYE", false, false}}};
}

/// One message per line: METHOD optionally followed by "sdp" or "smime".
/// '#' starts a comment.
inline CallScenario load_scenario_text(std::string_view text, std::string name = "custom") {
  CallScenario scenario;
  scenario.name = std::move(name);
  std::istringstream stream{std::string(text)};
  std::string line;
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string method;
    if (!(fields >> method) || method.front() == '#') continue;
    MessageTemplate tmpl{method, false, false};
    std::string flag;
    while (fields >> flag) {
      if (flag == "sdp") tmpl.has_sdp = true;
      else if (flag == "smime") tmpl.has_smime = true;
      else throw ConfigViolation("unknown scenario flag: " + flag);
    }
    if (tmpl.has_sdp && tmpl.has_smime) {
      throw ConfigViolation("a message cannot carry both sdp and smime bodies");
    }
    scenario.messages.push_back(std::move(tmpl));
  }
  if (scenario.messages.empty()) throw ConfigViolation("scenario has no messages");
  return scenario;
}

namespace detail {

/// Repeats `pattern` until the result has exactly n characters.
inline std::string cycle_to(std::string_view pattern, std::size_t n) {
  std::string out;
  out.reserve(n);
  while (out.size() < n) {
    out += pattern.substr(0, std::min(pattern.size(), n - out.size()));
  }
  return out;
}

inline std::string template_branch_token(std::size_t len) {
  // The two-and-a-bit leading index-0/1 symbols make the first sixteen bits
  // of the token decode to zero, so a framed extraction from an unembedded
  // template reads an empty payload instead of garbage.
  const std::string base = "AAB";
  if (len <= base.size()) return base.substr(0, len);
  return base + cycle_to("74bf9cDeF0k2m", len - base.size());
}

inline std::string template_sessid(std::size_t digits) {
  const std::string seed = "2890844526";
  if (digits <= seed.size()) return seed.substr(0, digits);
  return std::string(digits - seed.size(), '0') + seed;
}

inline std::string deterministic_envelope_blob() {
  // Placeholder for the binary envelopedData structure; content is opaque
  // to every channel.
  std::string out;
  for (int line = 0; line < 3; ++line) {
    for (int i = 0; i < 57; ++i) {
      out += kBase64Symbols[(static_cast<std::size_t>(line) * 17 + static_cast<std::size_t>(i) * 7 + 3) % 64];
    }
    out += "\r\n";
  }
  out += "...";
  return out;
}

}  // namespace detail

/// Builds one well-formed carrier message for a template. Token fields use
/// fixed plausible fillers; the reorderable headers start in their
/// alphabetical reference order so an unembedded flow scans clean.
inline SipMessage make_template_message(const MessageTemplate& tmpl, const ChannelConfig& cfg,
                                        std::uint32_t cseq_number) {
  SipMessage msg;
  msg.start_line = {StartLine::Kind::request, tmpl.method, "sip:bob@biloxi.example.com",
                    "SIP/2.0", ""};

  const auto add = [&msg](std::string name, std::string value) {
    msg.headers.push_back({std::move(name), " ", std::move(value), ""});
  };
  add("Via", "SIP/2.0/TCP client.atlanta.example.com:5060;branch=z9hG4bK" +
                 detail::template_branch_token(cfg.branch_len));
  add("Call-ID", detail::cycle_to("3848276298220188511", cfg.callid_len) + "@" + cfg.host_name);
  add("Contact", "AliceM <sip:alice@client.atlanta.example.com;transport=tcp>");
  add("CSeq", std::to_string(cseq_number) + " " + tmpl.method);
  add("From", "Alice <sip:alice@atlanta.example.com>;tag=" +
                  detail::cycle_to("daa21162", cfg.tag_len));
  add("Max-Forwards", "70");
  add("To", "Bob <sip:bob@biloxi.example.com>");

  if (tmpl.has_sdp) {
    SdpBody sdp;
    const std::string sessid = detail::template_sessid(cfg.sdp_sessid_digits);
    sdp.lines = {
        {'v', "0"},
        {'o', "alice " + sessid + " " + sessid + " IN IP4 client.atlanta.example.com"},
        {'s', "-"},
        {'c', "IN IP4 192.0.2.101"},
        {'t', "0 0"},
        {'k', "clear:" + detail::cycle_to("9123123kjhdasdoq12e31021n2e4", cfg.sdp_key_len)},
        {'m', "audio 49172 RTP/AVP 0"},
        {'a', "rtpmap:0 PCMU/8000"},
    };
    msg.body = std::move(sdp);
    add("Content-Type", "application/sdp");
  } else if (tmpl.has_smime) {
    MultipartBody mp;
    mp.boundary = detail::cycle_to("992d915fef419824", cfg.boundary_len);
    MultipartPart enveloped;
    enveloped.headers = {
        {"Content-Type", " ", "application/pkcs7-mime;smime-type=envelopeddata;name=smime.p7m", ""},
        {"Content-Disposition", " ", "attachment;handling=required;filename=smime.p7m", ""},
        {"Content-Transfer-Encoding", " ", "binary", ""},
    };
    enveloped.body = detail::deterministic_envelope_blob();
    MultipartPart signature;
    signature.headers = {
        {"Content-Type", " ", "application/pkcs7-signature;name=smime.p7s", ""},
        {"Content-Transfer-Encoding", " ", "base64", ""},
        {"Content-Disposition", " ", "attachment;filename=smime.p7s;handling=required", ""},
    };
    signature.body =
        base64_encode(std::vector<std::uint8_t>(cfg.signature_bits / 8, 0));
    mp.parts = {std::move(enveloped), std::move(signature)};
    const std::string boundary = mp.boundary;
    msg.body = std::move(mp);
    add("Content-Type", "multipart/signed;boundary=" + boundary +
                            ";micalg=sha1;protocol=application/pkcs7-signature");
  }
  if (msg.has_body()) {
    add("Content-Length", std::to_string(serialize_body(msg).size()));
  }
  return msg;
}

/// All carrier messages of a scenario, with ordinary CSeq numbering (the
/// ACK shares its transaction's number).
inline std::vector<SipMessage> scenario_messages(const CallScenario& scenario,
                                                 const ChannelConfig& cfg) {
  std::vector<SipMessage> out;
  out.reserve(scenario.messages.size());
  std::uint32_t number = 0;
  for (const auto& tmpl : scenario.messages) {
    if (tmpl.method != "ACK" || number == 0) ++number;
    out.push_back(make_template_message(tmpl, cfg, number));
  }
  return out;
}

struct ScheduleSlot {
  std::size_t message_index = 0;
  ChannelId channel = ChannelId::branch;
};

/// The deterministic slot order both sides walk: message by message,
/// channels in canonical application order, CSeq only on the first message.
inline std::vector<ScheduleSlot> embed_schedule(std::size_t n_messages,
                                                std::span<const ChannelId> enabled) {
  const std::vector<ChannelId> channels = ordered_channels(enabled);
  std::vector<ScheduleSlot> slots;
  slots.reserve(n_messages * channels.size());
  for (std::size_t i = 0; i < n_messages; ++i) {
    for (ChannelId id : channels) {
      if (id == ChannelId::cseq && i > 0) continue;
      slots.push_back({i, id});
    }
  }
  return slots;
}

inline std::uint64_t flow_capacity_bits(const CallScenario& scenario, const ChannelConfig& cfg,
                                        std::span<const ChannelId> enabled) {
  return measured_scenario(scenario_messages(scenario, cfg), cfg, enabled).total;
}

/// Frames the payload and spreads it over the scheduled slots, padding any
/// remaining capacity with zeros.
inline std::vector<SipMessage> flow_embed(const CallScenario& scenario, const BitString& payload,
                                          const ChannelConfig& cfg,
                                          std::span<const ChannelId> enabled) {
  cfg.validate();
  const BitString stream = frame_payload(payload);
  std::vector<SipMessage> messages = scenario_messages(scenario, cfg);

  std::size_t pos = 0;
  std::size_t total_capacity = 0;
  for (const ScheduleSlot& slot : embed_schedule(messages.size(), enabled)) {
    SipMessage& msg = messages[slot.message_index];
    const Channel& ch = channel(slot.channel);
    const std::size_t cap = ch.capacity(msg, cfg);
    if (cap == 0) continue;  // carrier not present on this message
    total_capacity += cap;
    const BitString remaining =
        pos < stream.size() ? stream.slice(pos, stream.size() - pos) : BitString{};
    EmbedResult result = ch.embed(msg, remaining, cfg);
    msg = std::move(result.message);
    pos += result.bits_consumed;
  }
  if (pos < stream.size()) {
    throw PayloadExceedsCapacity(stream.size(), total_capacity);
  }
  return messages;
}

/// Inverse of flow_embed over messages with the same scenario shape, config
/// and channel set.
inline BitString flow_extract(const std::vector<SipMessage>& messages, const ChannelConfig& cfg,
                              std::span<const ChannelId> enabled) {
  cfg.validate();
  BitString stream;
  for (const ScheduleSlot& slot : embed_schedule(messages.size(), enabled)) {
    const SipMessage& msg = messages[slot.message_index];
    const Channel& ch = channel(slot.channel);
    if (ch.capacity(msg, cfg) == 0) continue;
    stream.append(ch.extract(msg, cfg));
  }
  return deframe_payload(stream);
}

/// Fills every slot with seeded pseudo-random bits — decoy traffic for
/// exercising the analyzer, not a covert transmission.
inline std::vector<SipMessage> flow_fill_random(const CallScenario& scenario,
                                                const ChannelConfig& cfg,
                                                std::span<const ChannelId> enabled,
                                                std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::uint64_t word = 0;
  unsigned bits_left = 0;
  const auto next_bit = [&]() {
    if (bits_left == 0) {
      word = rng();
      bits_left = 64;
    }
    --bits_left;
    return ((word >> bits_left) & 1u) != 0;
  };

  std::vector<SipMessage> messages = scenario_messages(scenario, cfg);
  for (const ScheduleSlot& slot : embed_schedule(messages.size(), enabled)) {
    SipMessage& msg = messages[slot.message_index];
    const Channel& ch = channel(slot.channel);
    const std::size_t cap = ch.capacity(msg, cfg);
    if (cap == 0) continue;
    BitString bits;
    for (std::size_t i = 0; i < cap; ++i) bits.push_back(next_bit());
    msg = ch.embed(msg, bits, cfg).message;
  }
  return messages;
}

}  // namespace sipsteg
