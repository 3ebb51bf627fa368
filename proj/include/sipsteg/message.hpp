#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sipsteg/errors.hpp"

namespace sipsteg {

// A lossless in-memory model of a SIP message. Four of the covert channels
// live in whitespace, header order and header-name case, so the parser keeps
// every byte a conventional parser would throw away: trailing SP/HT runs,
// wire order, raw header-name spelling and the whitespace after each colon.
// serialize_message(parse_message(b)) == b for every accepted input.

inline bool is_linear_ws(char c) { return c == ' ' || c == '\t'; }

inline bool is_ws_run(std::string_view s) {
  return std::all_of(s.begin(), s.end(), is_linear_ws);
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string ascii_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

/// Standard mixed-case spelling for a (case-folded) header name:
/// title-case per dash segment, with the handful of well-known exceptions.
inline std::string canonical_header_case(std::string_view canonical_name) {
  if (canonical_name == "call-id") return "Call-ID";
  if (canonical_name == "cseq") return "CSeq";
  if (canonical_name == "mime-version") return "MIME-Version";
  if (canonical_name == "www-authenticate") return "WWW-Authenticate";
  std::string out(canonical_name);
  bool start = true;
  for (char& c : out) {
    if (start) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    start = (c == '-');
  }
  return out;
}

struct StartLine {
  enum class Kind { request, response };

  Kind kind = Kind::request;
  std::string method_or_status;  // method for requests, status code for responses
  std::string uri_or_reason;     // request-URI, or the reason phrase
  std::string version;           // always begins "SIP/"
  std::string trailing_ws;       // SP/HT run after the line content

  bool is_request() const { return kind == Kind::request; }
};

/// One header line. `value` is the text after the colon and its whitespace,
/// with the trailing SP/HT run split off into trailing_ws. Serialization
/// always emits raw_name verbatim.
struct HeaderField {
  std::string raw_name;
  std::string sep;  // SP/HT run between ':' and the value
  std::string value;
  std::string trailing_ws;

  std::string canonical_name() const { return ascii_lower(raw_name); }

  struct Param {
    std::string name;
    std::string value;
  };

  /// Header parameters: top-level ';'-separated name=value segments of the
  /// value, skipping anything inside <...> or double quotes (so URI
  /// parameters inside angle brackets are not confused with header ones).
  std::vector<Param> params() const {
    std::vector<Param> out;
    for (const auto& [name_span, value_span] : param_spans()) {
      out.push_back({std::string(value.substr(name_span.first, name_span.second)),
                     std::string(value.substr(value_span.first, value_span.second))});
    }
    return out;
  }

  std::optional<std::string> param(std::string_view name) const {
    const std::string folded = ascii_lower(name);
    for (const auto& [name_span, value_span] : param_spans()) {
      if (ascii_lower(value.substr(name_span.first, name_span.second)) == folded) {
        return std::string(value.substr(value_span.first, value_span.second));
      }
    }
    return std::nullopt;
  }

  /// Copy with the named parameter's value replaced in place (appending
  /// ";name=value" when absent). Everything else round-trips verbatim.
  HeaderField with_param(std::string_view name, std::string_view new_value) const {
    HeaderField out = *this;
    const std::string folded = ascii_lower(name);
    for (const auto& [name_span, value_span] : param_spans()) {
      if (ascii_lower(value.substr(name_span.first, name_span.second)) == folded) {
        out.value = value.substr(0, value_span.first) + std::string(new_value) +
                    value.substr(value_span.first + value_span.second);
        return out;
      }
    }
    out.value = value + ";" + std::string(name) + "=" + std::string(new_value);
    return out;
  }

  HeaderField with_value(std::string new_value) const {
    HeaderField out = *this;
    out.value = std::move(new_value);
    return out;
  }

 private:
  // (name_pos, name_len) and (value_pos, value_len) pairs into `value`.
  using Span = std::pair<std::size_t, std::size_t>;

  std::vector<std::pair<Span, Span>> param_spans() const {
    std::vector<std::pair<Span, Span>> out;
    bool in_angle = false, in_quote = false;
    std::size_t seg_start = std::string::npos;
    const auto close_segment = [&](std::size_t seg_end) {
      if (seg_start == std::string::npos) return;
      std::size_t name_start = seg_start;
      while (name_start < seg_end && is_linear_ws(value[name_start])) ++name_start;
      const std::size_t eq = value.find('=', name_start);
      if (eq == std::string::npos || eq >= seg_end) {
        out.push_back({{name_start, seg_end - name_start}, {seg_end, 0}});
      } else {
        out.push_back({{name_start, eq - name_start}, {eq + 1, seg_end - eq - 1}});
      }
    };
    for (std::size_t i = 0; i < value.size(); ++i) {
      const char c = value[i];
      if (in_quote) {
        if (c == '"') in_quote = false;
      } else if (in_angle) {
        if (c == '>') in_angle = false;
      } else if (c == '"') {
        in_quote = true;
      } else if (c == '<') {
        in_angle = true;
      } else if (c == ';') {
        close_segment(i);
        seg_start = i + 1;
      }
    }
    close_segment(value.size());
    return out;
  }
};

struct SdpLine {
  char type = '\0';
  std::string value;
};

struct SdpBody {
  std::vector<SdpLine> lines;
  bool final_newline = true;

  const SdpLine* find(char type) const {
    for (const auto& line : lines) {
      if (line.type == type) return &line;
    }
    return nullptr;
  }

  SdpLine* find(char type) {
    for (auto& line : lines) {
      if (line.type == type) return &line;
    }
    return nullptr;
  }
};

struct MultipartPart {
  std::vector<HeaderField> headers;
  std::string body;  // raw bytes, excluding the CRLF owned by the next delimiter

  const HeaderField* find_header(std::string_view canonical) const {
    for (const auto& h : headers) {
      if (h.canonical_name() == canonical) return &h;
    }
    return nullptr;
  }
};

struct MultipartBody {
  std::string boundary;
  std::string preamble;  // bytes before the first delimiter (normally empty)
  std::vector<MultipartPart> parts;
  std::string epilogue;  // bytes after the closing delimiter
};

/// Body content the toolkit does not interpret (unknown Content-Type).
struct RawBody {
  std::string bytes;
};

using MessageBody = std::variant<std::monostate, SdpBody, MultipartBody, RawBody>;

struct SipMessage {
  StartLine start_line;
  std::vector<HeaderField> headers;
  MessageBody body;
  std::string line_terminator = "\r\n";
  // Set by operations that change body bytes; serialization then rewrites
  // the Content-Length value to match.
  bool content_length_dirty = false;

  bool has_body() const { return !std::holds_alternative<std::monostate>(body); }

  const HeaderField* find_header(std::string_view canonical) const {
    const std::string folded = ascii_lower(canonical);
    for (const auto& h : headers) {
      if (h.canonical_name() == folded) return &h;
    }
    return nullptr;
  }

  HeaderField* find_header(std::string_view canonical) {
    const std::string folded = ascii_lower(canonical);
    for (auto& h : headers) {
      if (h.canonical_name() == folded) return &h;
    }
    return nullptr;
  }
};

/// First header matching the case-folded name, in wire order.
inline std::optional<HeaderField> find_header(const SipMessage& msg,
                                              std::string_view canonical_name) {
  if (const HeaderField* h = msg.find_header(canonical_name)) return *h;
  return std::nullopt;
}

namespace detail {

struct LineCursor {
  std::string_view input;
  std::size_t pos = 0;
  std::string terminator = {};

  bool done() const { return pos >= input.size(); }

  /// Next line without its terminator. The first line fixes the terminator
  /// (CRLF or bare LF) for the whole message.
  std::string_view next_line() {
    const std::size_t nl = input.find('\n', pos);
    if (nl == std::string_view::npos) {
      throw MalformedMessage("line without terminator");
    }
    const bool crlf = nl > pos && input[nl - 1] == '\r';
    if (terminator.empty()) {
      terminator = crlf ? "\r\n" : "\n";
    } else if ((terminator == "\r\n") != crlf) {
      throw MalformedMessage("mixed line terminators");
    }
    std::string_view line = input.substr(pos, nl - pos - (crlf ? 1 : 0));
    pos = nl + 1;
    return line;
  }

  std::string_view rest() const { return input.substr(pos); }
};

inline std::string_view strip_trailing_ws(std::string_view line, std::string& run) {
  std::size_t end = line.size();
  while (end > 0 && is_linear_ws(line[end - 1])) --end;
  run.assign(line.substr(end));
  return line.substr(0, end);
}

inline StartLine parse_start_line(std::string_view raw) {
  StartLine out;
  std::string_view line = strip_trailing_ws(raw, out.trailing_ws);
  if (line.empty()) throw MalformedMessage("no start line");

  if (line.starts_with("SIP/")) {
    out.kind = StartLine::Kind::response;
    const std::size_t sp1 = line.find(' ');
    if (sp1 == std::string_view::npos) throw MalformedMessage("status line without code");
    out.version = std::string(line.substr(0, sp1));
    const std::size_t sp2 = line.find(' ', sp1 + 1);
    if (sp2 == std::string_view::npos) {
      out.method_or_status = std::string(line.substr(sp1 + 1));
    } else {
      out.method_or_status = std::string(line.substr(sp1 + 1, sp2 - sp1 - 1));
      out.uri_or_reason = std::string(line.substr(sp2 + 1));
    }
    if (out.method_or_status.empty()) throw MalformedMessage("empty status code");
    return out;
  }

  out.kind = StartLine::Kind::request;
  const std::size_t sp1 = line.find(' ');
  const std::size_t sp2 = sp1 == std::string_view::npos ? std::string_view::npos
                                                        : line.find(' ', sp1 + 1);
  if (sp1 == std::string_view::npos || sp2 == std::string_view::npos ||
      line.find(' ', sp2 + 1) != std::string_view::npos) {
    throw MalformedMessage("request line is not method/URI/version");
  }
  out.method_or_status = std::string(line.substr(0, sp1));
  out.uri_or_reason = std::string(line.substr(sp1 + 1, sp2 - sp1 - 1));
  out.version = std::string(line.substr(sp2 + 1));
  if (out.method_or_status.empty() || out.uri_or_reason.empty()) {
    throw MalformedMessage("empty request-line token");
  }
  if (!out.version.starts_with("SIP/")) {
    throw MalformedMessage("request version does not begin with SIP/");
  }
  return out;
}

inline HeaderField parse_header_line(std::string_view raw) {
  if (!raw.empty() && is_linear_ws(raw.front())) {
    throw MalformedMessage("folded header continuation not supported");
  }
  const std::size_t colon = raw.find(':');
  if (colon == std::string_view::npos) throw MalformedMessage("header without colon");

  HeaderField out;
  out.raw_name = std::string(raw.substr(0, colon));
  if (out.raw_name.empty() || !std::none_of(out.raw_name.begin(), out.raw_name.end(),
                                            is_linear_ws)) {
    throw MalformedMessage("invalid header name");
  }

  std::string_view rest = raw.substr(colon + 1);
  std::size_t sep_len = 0;
  while (sep_len < rest.size() && is_linear_ws(rest[sep_len])) ++sep_len;
  if (sep_len == rest.size()) {
    // Value is empty; attribute all whitespace to the trailing run so the
    // whitespace channel survives a serialize/parse cycle on such lines.
    out.trailing_ws = std::string(rest);
    return out;
  }
  out.sep = std::string(rest.substr(0, sep_len));
  out.value = std::string(strip_trailing_ws(rest.substr(sep_len), out.trailing_ws));
  return out;
}

inline std::string serialize_header(const HeaderField& h) {
  return h.raw_name + ":" + h.sep + h.value + h.trailing_ws;
}

inline SdpBody parse_sdp_body(std::string_view bytes, const std::string& terminator) {
  SdpBody out;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t end = bytes.find(terminator, pos);
    std::size_t next;
    if (end == std::string_view::npos) {
      end = bytes.size();
      next = end;
      out.final_newline = false;
    } else {
      next = end + terminator.size();
    }
    std::string_view line = bytes.substr(pos, end - pos);
    if (line.size() < 2 || line[1] != '=' || !std::islower(static_cast<unsigned char>(line[0]))) {
      throw MalformedMessage("not an SDP line: " + std::string(line.substr(0, 20)));
    }
    out.lines.push_back({line[0], std::string(line.substr(2))});
    pos = next;
  }
  return out;
}

inline std::string serialize_sdp_body(const SdpBody& body, const std::string& terminator) {
  std::string out;
  for (std::size_t i = 0; i < body.lines.size(); ++i) {
    out += body.lines[i].type;
    out += '=';
    out += body.lines[i].value;
    if (i + 1 < body.lines.size() || body.final_newline) out += terminator;
  }
  return out;
}

inline MultipartBody parse_multipart_body(std::string_view bytes, std::string boundary,
                                          const std::string& terminator) {
  MultipartBody out;
  out.boundary = std::move(boundary);
  const std::string delim = "--" + out.boundary;
  const std::string closing = delim + "--";

  // Split into terminator-delimited lines, remembering byte offsets so part
  // bodies can be copied verbatim.
  struct Line {
    std::size_t start;
    std::size_t end;  // excluding terminator
    bool terminated;
  };
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    const std::size_t nl = bytes.find(terminator, pos);
    if (nl == std::string_view::npos) {
      if (pos <= bytes.size()) lines.push_back({pos, bytes.size(), false});
      break;
    }
    lines.push_back({pos, nl, true});
    pos = nl + terminator.size();
    if (pos == bytes.size()) break;
  }

  const auto line_text = [&](const Line& l) { return bytes.substr(l.start, l.end - l.start); };

  std::size_t i = 0;
  // Preamble: anything before the first delimiter line.
  std::size_t preamble_end = 0;
  while (i < lines.size() && line_text(lines[i]) != delim && line_text(lines[i]) != closing) {
    preamble_end = lines[i].terminated ? lines[i].end + terminator.size() : lines[i].end;
    ++i;
  }
  out.preamble = std::string(bytes.substr(0, preamble_end));
  if (i >= lines.size()) throw MalformedMessage("multipart body without delimiter");

  while (i < lines.size() && line_text(lines[i]) == delim) {
    ++i;  // past the delimiter line
    MultipartPart part;
    while (i < lines.size() && !line_text(lines[i]).empty()) {
      part.headers.push_back(parse_header_line(line_text(lines[i])));
      ++i;
    }
    if (i >= lines.size()) throw MalformedMessage("multipart part without blank line");
    ++i;  // past the blank line
    const std::size_t body_start = i < lines.size() ? lines[i].start : bytes.size();
    // Body runs until the line preceding the next delimiter; the terminator
    // before that delimiter belongs to the delimiter, not to the body.
    std::size_t body_end = body_start;
    bool found = false;
    while (i < lines.size()) {
      const auto text = line_text(lines[i]);
      if (text == delim || text == closing) {
        found = true;
        break;
      }
      body_end = lines[i].end;
      ++i;
    }
    if (!found) throw MalformedMessage("multipart part without closing delimiter");
    part.body = std::string(bytes.substr(body_start, body_end - body_start));
    out.parts.push_back(std::move(part));
    if (line_text(lines[i]) == closing) {
      // Everything past "--boundary--", terminator included, is epilogue.
      out.epilogue = std::string(bytes.substr(lines[i].end));
      return out;
    }
  }
  throw MalformedMessage("multipart body without closing delimiter");
}

inline std::string serialize_multipart_body(const MultipartBody& body,
                                            const std::string& terminator) {
  std::string out = body.preamble;
  for (const auto& part : body.parts) {
    out += "--" + body.boundary + terminator;
    for (const auto& h : part.headers) out += serialize_header(h) + terminator;
    out += terminator;
    out += part.body;
    out += terminator;
  }
  out += "--" + body.boundary + "--";
  out += body.epilogue;
  return out;
}

}  // namespace detail

inline std::string serialize_body(const SipMessage& msg) {
  if (const auto* sdp = std::get_if<SdpBody>(&msg.body)) {
    return detail::serialize_sdp_body(*sdp, msg.line_terminator);
  }
  if (const auto* mp = std::get_if<MultipartBody>(&msg.body)) {
    return detail::serialize_multipart_body(*mp, msg.line_terminator);
  }
  if (const auto* raw = std::get_if<RawBody>(&msg.body)) {
    return raw->bytes;
  }
  return {};
}

inline std::string serialize_start_line(const StartLine& sl) {
  if (sl.is_request()) {
    return sl.method_or_status + " " + sl.uri_or_reason + " " + sl.version + sl.trailing_ws;
  }
  std::string out = sl.version + " " + sl.method_or_status;
  if (!sl.uri_or_reason.empty()) out += " " + sl.uri_or_reason;
  return out + sl.trailing_ws;
}

/// Byte-exact inverse of parse_message. When the mutation flag is set, the
/// Content-Length value is recomputed from the serialized body first.
inline std::string serialize_message(const SipMessage& msg) {
  const std::string body = serialize_body(msg);
  std::string out = serialize_start_line(msg.start_line) + msg.line_terminator;
  for (const auto& h : msg.headers) {
    if (msg.content_length_dirty && h.canonical_name() == "content-length") {
      HeaderField fixed = h.with_value(std::to_string(body.size()));
      out += detail::serialize_header(fixed) + msg.line_terminator;
    } else {
      out += detail::serialize_header(h) + msg.line_terminator;
    }
  }
  out += msg.line_terminator;
  out += body;
  return out;
}

/// Parses a complete SIP message: start line, headers, empty line, optional
/// body. Content-Length is trusted when present; otherwise the body extends
/// to the end of input.
inline SipMessage parse_message(std::string_view bytes) {
  if (bytes.empty()) throw MalformedMessage("empty input");
  detail::LineCursor cursor{bytes};

  SipMessage msg;
  msg.start_line = detail::parse_start_line(cursor.next_line());
  while (true) {
    if (cursor.done()) throw MalformedMessage("missing blank line after headers");
    const std::string_view line = cursor.next_line();
    if (line.empty()) break;
    msg.headers.push_back(detail::parse_header_line(line));
  }
  msg.line_terminator = cursor.terminator;

  std::string_view body_bytes = cursor.rest();
  if (const HeaderField* cl = msg.find_header("content-length")) {
    std::size_t declared = 0;
    const std::string& v = cl->value;
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) {
          return c >= '0' && c <= '9';
        })) {
      throw MalformedMessage("non-numeric Content-Length");
    }
    declared = std::stoul(v);
    if (body_bytes.size() < declared) {
      throw MalformedMessage("body shorter than Content-Length");
    }
    if (body_bytes.size() > declared) {
      throw MalformedMessage("trailing bytes after declared body");
    }
  }
  if (body_bytes.empty()) return msg;

  std::string content_type;
  if (const HeaderField* ct = msg.find_header("content-type")) {
    std::string_view v = ct->value;
    const std::size_t semi = v.find(';');
    content_type = ascii_lower(v.substr(0, semi == std::string_view::npos ? v.size() : semi));
    while (!content_type.empty() && is_linear_ws(content_type.back())) content_type.pop_back();
  }

  if (content_type == "application/sdp") {
    msg.body = detail::parse_sdp_body(body_bytes, msg.line_terminator);
  } else if (content_type.starts_with("multipart/")) {
    const HeaderField* ct = msg.find_header("content-type");
    const auto boundary = ct->param("boundary");
    if (!boundary || boundary->empty()) {
      throw MalformedMessage("multipart body without boundary parameter");
    }
    msg.body = detail::parse_multipart_body(body_bytes, *boundary, msg.line_terminator);
  } else {
    msg.body = RawBody{std::string(body_bytes)};
  }
  return msg;
}

/// Default reorderable header set shared by the reorder channel, the
/// canonical form and the order scanner.
inline const std::vector<std::string>& default_reorderable_headers() {
  static const std::vector<std::string> headers = {
      "Call-ID", "Contact", "CSeq", "From", "Max-Forwards", "To"};
  return headers;
}

namespace detail {

/// Indices of headers belonging to the (case-folded) reorderable set, plus
/// the same headers sorted by canonical name — the reference order.
struct ReorderView {
  std::vector<std::size_t> slots;          // wire positions, ascending
  std::vector<std::size_t> sorted_by_name; // same indices, alphabetical
  bool has_duplicates = false;
};

inline ReorderView reorder_view(const std::vector<HeaderField>& headers,
                                std::span<const std::string> reorderable) {
  std::vector<std::string> folded;
  folded.reserve(reorderable.size());
  for (const auto& name : reorderable) folded.push_back(ascii_lower(name));

  ReorderView view;
  std::vector<std::string> seen;
  for (std::size_t i = 0; i < headers.size(); ++i) {
    const std::string name = headers[i].canonical_name();
    if (std::find(folded.begin(), folded.end(), name) == folded.end()) continue;
    if (std::find(seen.begin(), seen.end(), name) != seen.end()) view.has_duplicates = true;
    seen.push_back(name);
    view.slots.push_back(i);
  }
  view.sorted_by_name = view.slots;
  std::sort(view.sorted_by_name.begin(), view.sorted_by_name.end(),
            [&](std::size_t a, std::size_t b) {
              return headers[a].canonical_name() < headers[b].canonical_name();
            });
  return view;
}

}  // namespace detail

/// The warden's reference form: trailing whitespace emptied, header names in
/// standard mixed case, reorderable headers in their alphabetical reference
/// order. Values, parameters and body bytes are untouched.
inline SipMessage canonicalize(
    const SipMessage& msg,
    std::span<const std::string> reorderable = default_reorderable_headers()) {
  SipMessage out = msg;
  out.start_line.trailing_ws.clear();

  const auto view = detail::reorder_view(out.headers, reorderable);
  if (!view.has_duplicates) {
    std::vector<HeaderField> reordered = out.headers;
    for (std::size_t i = 0; i < view.slots.size(); ++i) {
      reordered[view.slots[i]] = out.headers[view.sorted_by_name[i]];
    }
    out.headers = std::move(reordered);
  }
  for (auto& h : out.headers) {
    h.raw_name = canonical_header_case(h.canonical_name());
    h.trailing_ws.clear();
  }
  if (auto* mp = std::get_if<MultipartBody>(&out.body)) {
    for (auto& part : mp->parts) {
      for (auto& h : part.headers) {
        h.raw_name = canonical_header_case(h.canonical_name());
        h.trailing_ws.clear();
      }
    }
    out.content_length_dirty = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flow files: a sequence of raw messages joined by a separator line. The
// separator is an artifact convention, not SIP; the exact byte string below
// is inserted between message blobs so arbitrary message endings round-trip.

inline constexpr std::string_view kFlowSeparator = "\n--- sipsteg-message-boundary ---\n";

inline std::string join_flow(std::span<const std::string> messages) {
  std::string out;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (i > 0) out += kFlowSeparator;
    out += messages[i];
  }
  return out;
}

inline std::vector<std::string> split_flow(std::string_view file_bytes) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t sep = file_bytes.find(kFlowSeparator, pos);
    if (sep == std::string_view::npos) {
      out.emplace_back(file_bytes.substr(pos));
      return out;
    }
    out.emplace_back(file_bytes.substr(pos, sep - pos));
    pos = sep + kFlowSeparator.size();
  }
}

}  // namespace sipsteg
