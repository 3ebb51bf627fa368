#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sipsteg/alphabet.hpp"
#include "sipsteg/base64.hpp"
#include "sipsteg/bitstring.hpp"
#include "sipsteg/config.hpp"
#include "sipsteg/errors.hpp"
#include "sipsteg/message.hpp"
#include "sipsteg/permutation.hpp"

namespace sipsteg {

enum class ChannelId {
  branch,
  tag,
  call_id,
  cseq,
  max_forwards,
  free_text,
  sdp_fields,
  smime_boundary,
  smime_signature,
  header_reorder,
  case_modulation,
  whitespace,
};

inline std::string_view to_string(ChannelId id) {
  switch (id) {
    case ChannelId::branch: return "branch";
    case ChannelId::tag: return "tag";
    case ChannelId::call_id: return "call_id";
    case ChannelId::cseq: return "cseq";
    case ChannelId::max_forwards: return "max_forwards";
    case ChannelId::free_text: return "free_text";
    case ChannelId::sdp_fields: return "sdp_fields";
    case ChannelId::smime_boundary: return "smime_boundary";
    case ChannelId::smime_signature: return "smime_signature";
    case ChannelId::header_reorder: return "header_reorder";
    case ChannelId::case_modulation: return "case_modulation";
    case ChannelId::whitespace: return "whitespace";
  }
  return "?";
}

/// Channels in the order the flow engine applies them within one message:
/// content channels first, then reordering, then case modulation, and
/// whitespace last so line-position based decoding stays stable.
inline const std::vector<ChannelId>& canonical_channel_order() {
  static const std::vector<ChannelId> order = {
      ChannelId::branch,         ChannelId::tag,
      ChannelId::call_id,        ChannelId::cseq,
      ChannelId::max_forwards,   ChannelId::free_text,
      ChannelId::sdp_fields,     ChannelId::smime_boundary,
      ChannelId::smime_signature, ChannelId::header_reorder,
      ChannelId::case_modulation, ChannelId::whitespace,
  };
  return order;
}

inline std::optional<ChannelId> channel_from_string(std::string_view name) {
  for (ChannelId id : canonical_channel_order()) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

struct EmbedResult {
  SipMessage message;
  std::size_t bits_consumed = 0;
};

/// The uniform contract every covert channel implements. Channels are
/// stateless value transformers; embed returns a new message and the number
/// of payload bits it consumed (min of payload length and capacity — the
/// carrier is zero-padded past the payload, never left partially written).
class Channel {
 public:
  virtual ~Channel() = default;
  virtual ChannelId id() const = 0;
  virtual std::size_t capacity(const SipMessage& msg, const ChannelConfig& cfg) const = 0;
  virtual EmbedResult embed(const SipMessage& msg, const BitString& payload,
                            const ChannelConfig& cfg) const = 0;
  virtual BitString extract(const SipMessage& msg, const ChannelConfig& cfg) const = 0;
};

namespace detail {

inline constexpr std::string_view kMagicCookie = "z9hG4bK";

inline std::size_t consumed_bits(const BitString& payload, std::size_t capacity) {
  return payload.size() < capacity ? payload.size() : capacity;
}

/// Decodes at most n_chars leading characters of a field. Embedded fields
/// have exactly n_chars; tolerating shorter/longer content lets extraction
/// run over ordinary traffic too.
inline BitString decode_prefix(std::string_view field, const Alphabet& alphabet,
                               std::size_t n_chars) {
  return decode_text(field.substr(0, std::min(field.size(), n_chars)), alphabet);
}

class BranchChannel final : public Channel {
 public:
  ChannelId id() const override { return ChannelId::branch; }

  std::size_t capacity(const SipMessage& msg, const ChannelConfig& cfg) const override {
    const HeaderField* via = msg.find_header("via");
    return via && via->param("branch") ? 6 * cfg.branch_len : 0;
  }

  EmbedResult embed(const SipMessage& msg, const BitString& payload,
                    const ChannelConfig& cfg) const override {
    HeaderField* via = nullptr;
    SipMessage out = msg;
    via = out.find_header("via");
    if (!via || !via->param("branch")) {
      throw ChannelAbsent("no Via header with a branch parameter");
    }
    const std::string token = encode_text(payload, Alphabet::token64(), cfg.branch_len);
    *via = via->with_param("branch", std::string(kMagicCookie) + token);
    return {std::move(out), consumed_bits(payload, 6 * cfg.branch_len)};
  }

  BitString extract(const SipMessage& msg, const ChannelConfig& cfg) const override {
    const HeaderField* via = msg.find_header("via");
    if (!via) throw ChannelAbsent("no Via header");
    const auto branch = via->param("branch");
    if (!branch) throw ChannelAbsent("Via has no branch parameter");
    if (!branch->starts_with(kMagicCookie)) {
      throw SymbolNotInAlphabet("branch does not start with the magic cookie");
    }
    return decode_prefix(std::string_view(*branch).substr(kMagicCookie.size()),
                         Alphabet::token64(), cfg.branch_len);
  }
};

class TagChannel final : public Channel {
 public:
  ChannelId id() const override { return ChannelId::tag; }

  std::size_t capacity(const SipMessage& msg, const ChannelConfig& cfg) const override {
    return msg.find_header("from") ? 4 * cfg.tag_len : 0;
  }

  EmbedResult embed(const SipMessage& msg, const BitString& payload,
                    const ChannelConfig& cfg) const override {
    check_len(cfg);
    SipMessage out = msg;
    HeaderField* from = out.find_header("from");
    if (!from) throw ChannelAbsent("no From header");
    *from = from->with_param("tag", encode_text(payload, Alphabet::hex(), cfg.tag_len));
    return {std::move(out), consumed_bits(payload, 4 * cfg.tag_len)};
  }

  BitString extract(const SipMessage& msg, const ChannelConfig& cfg) const override {
    check_len(cfg);
    const HeaderField* from = msg.find_header("from");
    if (!from) throw ChannelAbsent("no From header");
    const auto tag = from->param("tag");
    if (!tag) throw ChannelAbsent("From has no tag parameter");
    return decode_prefix(*tag, Alphabet::hex(), cfg.tag_len);
  }

 private:
  // Dialog tags promise at least 32 bits of randomness, so 8 hex characters
  // is the floor.
  static void check_len(const ChannelConfig& cfg) {
    if (cfg.tag_len < 8) throw ConfigViolation("tag_len must be >= 8 hex chars");
  }
};

class CallIdChannel final : public Channel {
 public:
  ChannelId id() const override { return ChannelId::call_id; }

  std::size_t capacity(const SipMessage& msg, const ChannelConfig& cfg) const override {
    return msg.find_header("call-id") ? 4 * cfg.callid_len : 0;
  }

  EmbedResult embed(const SipMessage& msg, const BitString& payload,
                    const ChannelConfig& cfg) const override {
    SipMessage out = msg;
    HeaderField* callid = out.find_header("call-id");
    if (!callid) throw ChannelAbsent("no Call-ID header");
    *callid = callid->with_value(encode_text(payload, Alphabet::hex(), cfg.callid_len) +
                                 "@" + cfg.host_name);
    return {std::move(out), consumed_bits(payload, 4 * cfg.callid_len)};
  }

  BitString extract(const SipMessage& msg, const ChannelConfig& cfg) const override {
    const HeaderField* callid = msg.find_header("call-id");
    if (!callid) throw ChannelAbsent("no Call-ID header");
    std::string_view local = callid->value;
    const std::size_t at = local.find('@');
    if (at != std::string_view::npos) local = local.substr(0, at);
    return decode_prefix(local, Alphabet::hex(), cfg.callid_len);
  }
};

class CseqChannel final : public Channel {
 public:
  ChannelId id() const override { return ChannelId::cseq; }

  std::size_t capacity(const SipMessage& msg, const ChannelConfig&) const override {
    return msg.find_header("cseq") ? 31 : 0;
  }

  EmbedResult embed(const SipMessage& msg, const BitString& payload,
                    const ChannelConfig&) const override {
    SipMessage out = msg;
    HeaderField* cseq = out.find_header("cseq");
    if (!cseq) throw ChannelAbsent("no CSeq header");
    const std::uint64_t number = payload.read_uint_padded(0, 31);
    const std::size_t split = number_end(cseq->value);
    *cseq = cseq->with_value(std::to_string(number) + cseq->value.substr(split));
    return {std::move(out), consumed_bits(payload, 31)};
  }

  BitString extract(const SipMessage& msg, const ChannelConfig&) const override {
    const HeaderField* cseq = msg.find_header("cseq");
    if (!cseq) throw ChannelAbsent("no CSeq header");
    const std::string_view value = cseq->value;
    return BitString::from_uint(decimal_parse(value.substr(0, number_end(value)), 31), 31);
  }

 private:
  static std::size_t number_end(std::string_view value) {
    std::size_t i = 0;
    while (i < value.size() && !is_linear_ws(value[i])) ++i;
    return i;
  }
};

class MaxForwardsChannel final : public Channel {
 public:
  ChannelId id() const override { return ChannelId::max_forwards; }

  std::size_t capacity(const SipMessage& msg, const ChannelConfig&) const override {
    return msg.find_header("max-forwards") ? 4 : 0;
  }

  EmbedResult embed(const SipMessage& msg, const BitString& payload,
                    const ChannelConfig&) const override {
    SipMessage out = msg;
    HeaderField* mf = out.find_header("max-forwards");
    if (!mf) throw ChannelAbsent("no Max-Forwards header");
    // 70 is the recommended initial value; 70-n keeps the range [55,70]
    // plausible for a real route.
    const std::uint64_t n = payload.read_uint_padded(0, 4);
    *mf = mf->with_value(std::to_string(70 - n));
    return {std::move(out), consumed_bits(payload, 4)};
  }

  BitString extract(const SipMessage& msg, const ChannelConfig&) const override {
    const HeaderField* mf = msg.find_header("max-forwards");
    if (!mf) throw ChannelAbsent("no Max-Forwards header");
    const std::uint64_t value = decimal_parse(mf->value, 64);
    if (value < 55 || value > 70) {
      throw SymbolNotInAlphabet("Max-Forwards outside the covert range [55,70]");
    }
    return BitString::from_uint(70 - value, 4);
  }
};

/// Free-text fields in deterministic carrier order. Subject, Organization
/// and User-Agent may be added when missing; Contact only lends its display
/// name; Call-Info and Reply-To are used only when already present.
class FreeTextChannel final : public Channel {
 public:
  ChannelId id() const override { return ChannelId::free_text; }

  std::size_t capacity(const SipMessage& msg, const ChannelConfig& cfg) const override {
    return 6 * cfg.freetext_len * carriers(msg, cfg, /*for_embed=*/true).size();
  }

  EmbedResult embed(const SipMessage& msg, const BitString& payload,
                    const ChannelConfig& cfg) const override {
    SipMessage out = msg;
    const auto used = carriers(out, cfg, /*for_embed=*/true);
    std::size_t pos = 0;
    for (const auto& carrier : used) {
      const std::string token = encode_text(payload.slice_padded(pos, 6 * cfg.freetext_len),
                                            Alphabet::token64(), cfg.freetext_len);
      pos += 6 * cfg.freetext_len;
      if (carrier == "contact") {
        HeaderField* contact = out.find_header("contact");
        const std::size_t lt = contact->value.find('<');
        *contact = contact->with_value(token + " " + contact->value.substr(lt));
      } else if (HeaderField* h = out.find_header(carrier)) {
        *h = h->with_value(token);
      } else {
        out.headers.push_back({canonical_header_case(carrier), " ", token, ""});
      }
    }
    return {std::move(out), consumed_bits(payload, 6 * cfg.freetext_len * used.size())};
  }

  BitString extract(const SipMessage& msg, const ChannelConfig& cfg) const override {
    BitString out;
    for (const auto& carrier : carriers(msg, cfg, /*for_embed=*/false)) {
      const HeaderField* h = msg.find_header(carrier == "contact" ? "contact" : carrier);
      std::string_view text = h->value;
      if (carrier == "contact") {
        text = text.substr(0, text.find('<'));
        while (!text.empty() && is_linear_ws(text.back())) text.remove_suffix(1);
      }
      out.append(decode_prefix(text, Alphabet::token64(), cfg.freetext_len));
    }
    return out;
  }

 private:
  static std::vector<std::string> carriers(const SipMessage& msg, const ChannelConfig& cfg,
                                           bool for_embed) {
    std::vector<std::string> out;
    const HeaderField* contact = msg.find_header("contact");
    if (contact && contact->value.find('<') != std::string::npos) out.push_back("contact");
    for (const char* name : {"subject", "organization", "call-info", "reply-to", "user-agent"}) {
      const bool addable = std::string_view(name) == "subject" ||
                           std::string_view(name) == "organization" ||
                           std::string_view(name) == "user-agent";
      if (msg.find_header(name) || (for_embed && addable && cfg.freetext_add_missing)) {
        out.emplace_back(name);
      }
    }
    return out;
  }
};

class SdpFieldsChannel final : public Channel {
 public:
  ChannelId id() const override { return ChannelId::sdp_fields; }

  std::size_t capacity(const SipMessage& msg, const ChannelConfig& cfg) const override {
    const auto* sdp = std::get_if<SdpBody>(&msg.body);
    if (!sdp) return 0;
    const unsigned id_bits = decimal_payload_bits(cfg.sdp_sessid_digits);
    std::size_t total = 0;
    if (origin_spans(sdp)) total += 2 * id_bits;
    if (sdp->find('s')) total += 6 * cfg.sdp_sessname_len;
    total += 6 * cfg.sdp_key_len;  // k= line is added when absent
    return total;
  }

  EmbedResult embed(const SipMessage& msg, const BitString& payload,
                    const ChannelConfig& cfg) const override {
    SipMessage out = msg;
    auto* sdp = std::get_if<SdpBody>(&out.body);
    if (!sdp) throw ChannelAbsent("message has no SDP body");

    const unsigned id_bits = decimal_payload_bits(cfg.sdp_sessid_digits);
    std::size_t pos = 0;
    if (const auto spans = origin_spans(sdp)) {
      SdpLine* o = sdp->find('o');
      const std::string sess_id =
          decimal_render(payload.read_uint_padded(pos, id_bits), cfg.sdp_sessid_digits);
      pos += id_bits;
      const std::string sess_version =
          decimal_render(payload.read_uint_padded(pos, id_bits), cfg.sdp_sessid_digits);
      pos += id_bits;
      const auto& [id_span, ver_span] = *spans;
      // Replace the rightmost span first so offsets stay valid.
      std::string value = o->value;
      value.replace(ver_span.first, ver_span.second, sess_version);
      value.replace(id_span.first, id_span.second, sess_id);
      o->value = std::move(value);
    }
    if (SdpLine* s = sdp->find('s')) {
      s->value = encode_text(payload.slice_padded(pos, 6 * cfg.sdp_sessname_len),
                             Alphabet::token64(), cfg.sdp_sessname_len);
      pos += 6 * cfg.sdp_sessname_len;
    }
    const std::string key = "clear:" + encode_text(payload.slice_padded(pos, 6 * cfg.sdp_key_len),
                                                   Alphabet::token64(), cfg.sdp_key_len);
    pos += 6 * cfg.sdp_key_len;
    if (SdpLine* k = sdp->find('k')) {
      k->value = key;
    } else {
      auto it = sdp->lines.begin();
      while (it != sdp->lines.end() && it->type != 'm') ++it;
      sdp->lines.insert(it, {'k', key});
    }
    out.content_length_dirty = true;
    return {std::move(out), consumed_bits(payload, capacity(msg, cfg))};
  }

  BitString extract(const SipMessage& msg, const ChannelConfig& cfg) const override {
    const auto* sdp = std::get_if<SdpBody>(&msg.body);
    if (!sdp) throw ChannelAbsent("message has no SDP body");

    const unsigned id_bits = decimal_payload_bits(cfg.sdp_sessid_digits);
    BitString out;
    if (const auto spans = origin_spans(sdp)) {
      const SdpLine* o = sdp->find('o');
      const auto& [id_span, ver_span] = *spans;
      out.append(BitString::from_uint(
          decimal_parse(std::string_view(o->value).substr(id_span.first, id_span.second), id_bits),
          id_bits));
      out.append(BitString::from_uint(
          decimal_parse(std::string_view(o->value).substr(ver_span.first, ver_span.second), id_bits),
          id_bits));
    }
    if (const SdpLine* s = sdp->find('s')) {
      out.append(decode_prefix(s->value, Alphabet::token64(), cfg.sdp_sessname_len));
    }
    if (const SdpLine* k = sdp->find('k')) {
      const std::string_view value = k->value;
      if (!value.starts_with("clear:")) {
        throw SymbolNotInAlphabet("k= line does not carry a clear: key");
      }
      out.append(decode_prefix(value.substr(6), Alphabet::token64(), cfg.sdp_key_len));
    }
    return out;
  }

 private:
  using Span = std::pair<std::size_t, std::size_t>;

  /// (sess-id, sess-version) spans inside the o= value, i.e. its second and
  /// third space-separated tokens.
  static std::optional<std::pair<Span, Span>> origin_spans(const SdpBody* sdp) {
    const SdpLine* o = sdp->find('o');
    if (!o) return std::nullopt;
    std::vector<Span> tokens;
    const std::string& v = o->value;
    std::size_t i = 0;
    while (i < v.size() && tokens.size() < 4) {
      while (i < v.size() && v[i] == ' ') ++i;
      const std::size_t start = i;
      while (i < v.size() && v[i] != ' ') ++i;
      if (i > start) tokens.push_back({start, i - start});
    }
    if (tokens.size() < 3) return std::nullopt;
    return std::make_pair(tokens[1], tokens[2]);
  }
};

class SmimeBoundaryChannel final : public Channel {
 public:
  ChannelId id() const override { return ChannelId::smime_boundary; }

  std::size_t capacity(const SipMessage& msg, const ChannelConfig& cfg) const override {
    return std::holds_alternative<MultipartBody>(msg.body) ? 4 * cfg.boundary_len : 0;
  }

  EmbedResult embed(const SipMessage& msg, const BitString& payload,
                    const ChannelConfig& cfg) const override {
    SipMessage out = msg;
    auto* mp = std::get_if<MultipartBody>(&out.body);
    if (!mp) throw ChannelAbsent("message body is not multipart");
    const std::string boundary = encode_text(payload, Alphabet::hex(), cfg.boundary_len);
    mp->boundary = boundary;
    if (HeaderField* ct = out.find_header("content-type")) {
      *ct = ct->with_param("boundary", boundary);
    }
    out.content_length_dirty = true;
    return {std::move(out), consumed_bits(payload, 4 * cfg.boundary_len)};
  }

  BitString extract(const SipMessage& msg, const ChannelConfig& cfg) const override {
    const auto* mp = std::get_if<MultipartBody>(&msg.body);
    if (!mp) throw ChannelAbsent("message body is not multipart");
    return decode_prefix(mp->boundary, Alphabet::hex(), cfg.boundary_len);
  }
};

class SmimeSignatureChannel final : public Channel {
 public:
  ChannelId id() const override { return ChannelId::smime_signature; }

  std::size_t capacity(const SipMessage& msg, const ChannelConfig& cfg) const override {
    const auto* mp = std::get_if<MultipartBody>(&msg.body);
    return mp && find_signature_part(*mp) ? cfg.signature_bits : 0;
  }

  EmbedResult embed(const SipMessage& msg, const BitString& payload,
                    const ChannelConfig& cfg) const override {
    SipMessage out = msg;
    auto* mp = std::get_if<MultipartBody>(&out.body);
    MultipartPart* part = mp ? find_signature_part(*mp) : nullptr;
    if (!part) throw ChannelAbsent("no application/pkcs7-signature part");
    const auto bytes = payload.slice_padded(0, cfg.signature_bits).to_bytes();
    part->body = base64_encode(bytes);
    out.content_length_dirty = true;
    return {std::move(out), consumed_bits(payload, cfg.signature_bits)};
  }

  BitString extract(const SipMessage& msg, const ChannelConfig& cfg) const override {
    const auto* mp = std::get_if<MultipartBody>(&msg.body);
    const MultipartPart* part = mp ? find_signature_part(*mp) : nullptr;
    if (!part) throw ChannelAbsent("no application/pkcs7-signature part");
    const auto bytes = base64_decode(part->body);
    const BitString bits = BitString::from_bytes(bytes);
    if (bits.size() < cfg.signature_bits) {
      throw TruncatedStream("signature part shorter than signature_bits");
    }
    return bits.slice(0, cfg.signature_bits);
  }

 private:
  static MultipartPart* find_signature_part(MultipartBody& mp) {
    for (auto& part : mp.parts) {
      if (const HeaderField* ct = part.find_header("content-type")) {
        if (ascii_lower(ct->value).find("application/pkcs7-signature") != std::string::npos) {
          return &part;
        }
      }
    }
    return nullptr;
  }

  static const MultipartPart* find_signature_part(const MultipartBody& mp) {
    for (const auto& part : mp.parts) {
      if (const HeaderField* ct = part.find_header("content-type")) {
        if (ascii_lower(ct->value).find("application/pkcs7-signature") != std::string::npos) {
          return &part;
        }
      }
    }
    return nullptr;
  }
};

class HeaderReorderChannel final : public Channel {
 public:
  ChannelId id() const override { return ChannelId::header_reorder; }

  std::size_t capacity(const SipMessage& msg, const ChannelConfig& cfg) const override {
    const auto view = reorder_view(msg.headers, cfg.reorderable_headers);
    if (view.has_duplicates || view.slots.size() < 2) return 0;
    return permutation_capacity_bits(static_cast<unsigned>(view.slots.size()));
  }

  EmbedResult embed(const SipMessage& msg, const BitString& payload,
                    const ChannelConfig& cfg) const override {
    const auto view = reorder_view(msg.headers, cfg.reorderable_headers);
    if (view.has_duplicates) {
      throw DuplicateReorderableHeader("a reorderable header appears more than once");
    }
    if (view.slots.size() < 2) {
      throw ChannelAbsent("fewer than two reorderable headers present");
    }
    const auto n = static_cast<unsigned>(view.slots.size());
    const unsigned cap = permutation_capacity_bits(n);
    const Permutation perm = lehmer_encode(payload.read_uint_padded(0, cap), n);

    SipMessage out = msg;
    for (std::size_t i = 0; i < view.slots.size(); ++i) {
      out.headers[view.slots[i]] = msg.headers[view.sorted_by_name[perm[i]]];
    }
    return {std::move(out), consumed_bits(payload, cap)};
  }

  BitString extract(const SipMessage& msg, const ChannelConfig& cfg) const override {
    const auto view = reorder_view(msg.headers, cfg.reorderable_headers);
    if (view.has_duplicates) {
      throw DuplicateReorderableHeader("a reorderable header appears more than once");
    }
    if (view.slots.size() < 2) {
      throw ChannelAbsent("fewer than two reorderable headers present");
    }
    const auto n = static_cast<unsigned>(view.slots.size());
    const unsigned cap = permutation_capacity_bits(n);
    Permutation perm(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = std::find(view.sorted_by_name.begin(), view.sorted_by_name.end(),
                                view.slots[i]);
      perm[i] = static_cast<unsigned>(it - view.sorted_by_name.begin());
    }
    const std::uint64_t value = lehmer_decode(perm);
    if (cap < 64 && value >= (std::uint64_t{1} << cap)) {
      throw SymbolNotInAlphabet("header order outside the encodable range");
    }
    return BitString::from_uint(value, cap);
  }
};

class CaseModulationChannel final : public Channel {
 public:
  ChannelId id() const override { return ChannelId::case_modulation; }

  std::size_t capacity(const SipMessage& msg, const ChannelConfig& cfg) const override {
    return selected(msg, cfg).size();
  }

  EmbedResult embed(const SipMessage& msg, const BitString& payload,
                    const ChannelConfig& cfg) const override {
    SipMessage out = msg;
    const auto indices = selected(out, cfg);
    for (std::size_t k = 0; k < indices.size(); ++k) {
      HeaderField& h = out.headers[indices[k]];
      h.raw_name = payload.bit_or_zero(k) ? ascii_upper(h.raw_name) : ascii_lower(h.raw_name);
    }
    return {std::move(out), consumed_bits(payload, indices.size())};
  }

  BitString extract(const SipMessage& msg, const ChannelConfig& cfg) const override {
    BitString out;
    for (std::size_t index : selected(msg, cfg)) {
      // All-uppercase decodes as 1, anything else as 0; mixed case reads as
      // an unmodulated zero so extraction stays total.
      const std::string& name = msg.headers[index].raw_name;
      const bool has_lower = std::any_of(name.begin(), name.end(), [](char c) {
        return std::islower(static_cast<unsigned char>(c));
      });
      out.push_back(!has_lower);
    }
    return out;
  }

 private:
  static std::vector<std::size_t> selected(const SipMessage& msg, const ChannelConfig& cfg) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < msg.headers.size(); ++i) {
      if (!cfg.case_headers) {
        out.push_back(i);
        continue;
      }
      const std::string name = msg.headers[i].canonical_name();
      for (const auto& wanted : *cfg.case_headers) {
        if (ascii_lower(wanted) == name) {
          out.push_back(i);
          break;
        }
      }
    }
    return out;
  }
};

class WhitespaceChannel final : public Channel {
 public:
  ChannelId id() const override { return ChannelId::whitespace; }

  std::size_t capacity(const SipMessage& msg, const ChannelConfig& cfg) const override {
    return cfg.ws_run_len * (1 + msg.headers.size());
  }

  EmbedResult embed(const SipMessage& msg, const BitString& payload,
                    const ChannelConfig& cfg) const override {
    SipMessage out = msg;
    std::size_t pos = 0;
    out.start_line.trailing_ws = run(payload, pos, cfg.ws_run_len);
    pos += cfg.ws_run_len;
    for (auto& h : out.headers) {
      h.trailing_ws = run(payload, pos, cfg.ws_run_len);
      pos += cfg.ws_run_len;
    }
    return {std::move(out), consumed_bits(payload, pos)};
  }

  BitString extract(const SipMessage& msg, const ChannelConfig&) const override {
    BitString out;
    const auto read_run = [&out](const std::string& ws) {
      for (char c : ws) out.push_back(c == '\t');
    };
    read_run(msg.start_line.trailing_ws);
    for (const auto& h : msg.headers) read_run(h.trailing_ws);
    return out;
  }

 private:
  static std::string run(const BitString& payload, std::size_t pos, std::size_t len) {
    std::string out;
    out.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      out.push_back(payload.bit_or_zero(pos + i) ? '\t' : ' ');
    }
    return out;
  }
};

}  // namespace detail

/// The stateless singleton implementing a channel id.
inline const Channel& channel(ChannelId id) {
  static const detail::BranchChannel branch;
  static const detail::TagChannel tag;
  static const detail::CallIdChannel call_id;
  static const detail::CseqChannel cseq;
  static const detail::MaxForwardsChannel max_forwards;
  static const detail::FreeTextChannel free_text;
  static const detail::SdpFieldsChannel sdp_fields;
  static const detail::SmimeBoundaryChannel smime_boundary;
  static const detail::SmimeSignatureChannel smime_signature;
  static const detail::HeaderReorderChannel header_reorder;
  static const detail::CaseModulationChannel case_modulation;
  static const detail::WhitespaceChannel whitespace;
  switch (id) {
    case ChannelId::branch: return branch;
    case ChannelId::tag: return tag;
    case ChannelId::call_id: return call_id;
    case ChannelId::cseq: return cseq;
    case ChannelId::max_forwards: return max_forwards;
    case ChannelId::free_text: return free_text;
    case ChannelId::sdp_fields: return sdp_fields;
    case ChannelId::smime_boundary: return smime_boundary;
    case ChannelId::smime_signature: return smime_signature;
    case ChannelId::header_reorder: return header_reorder;
    case ChannelId::case_modulation: return case_modulation;
    case ChannelId::whitespace: return whitespace;
  }
  throw ConfigViolation("unknown channel id");
}

/// Bits the channel would consume given an over-long payload; 0 when the
/// carrier is absent.
inline std::size_t channel_capacity(ChannelId id, const SipMessage& msg,
                                    const ChannelConfig& cfg) {
  return channel(id).capacity(msg, cfg);
}

/// Filters `enabled` into canonical application order.
inline std::vector<ChannelId> ordered_channels(std::span<const ChannelId> enabled) {
  std::vector<ChannelId> out;
  for (ChannelId id : canonical_channel_order()) {
    for (ChannelId e : enabled) {
      if (e == id) {
        out.push_back(id);
        break;
      }
    }
  }
  return out;
}

}  // namespace sipsteg
