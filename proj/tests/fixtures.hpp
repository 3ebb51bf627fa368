#pragma once

#include <string>

// Reference carrier messages used across the test suites. The INVITE+SDP
// and INVITE+S/MIME messages mirror the classic example call between
// alice@atlanta and bob@biloxi; Content-Length values are computed so the
// fixtures are wire-valid.

namespace fixtures {

/// INVITE carrying a plain SDP session description.
inline std::string sdp_invite() {
  const std::string body =
      "v=0\r\n"
      "o=alice 2890844526 2890844526 IN IP4 client.atlanta.example.com\r\n"
      "s=-\r\n"
      "c=IN IP4 192.0.2.101\r\n"
      "t=0 0\r\n"
      "k=clear:9123123kjhdasdoq12e31021n2e4\r\n"
      "m=audio 49172 RTP/AVP 0\r\n"
      "a=rtpmap:0 PCMU/8000\r\n";
  return
      "INVITE sip:bob@biloxi.example.com SIP/2.0\r\n"
      "Via: SIP/2.0/TCP client.atlanta.example.com:5060;branch=z9hG4bK74bf9\r\n"
      "Max-Forwards: 70\r\n"
      "From: Alice <sip:alice@atlanta.example.com>;tag=9fxced76s1\r\n"
      "To: Bob <sip:bob@biloxi.example.com>\r\n"
      "Call-ID: 3848276298220188511@atlanta.example.com\r\n"
      "CSeq: 12345 INVITE\r\n"
      "Contact: AliceM <sip:alice@client.atlanta.example.com;transport=tcp>\r\n"
      "Content-Type: application/sdp\r\n"
      "Content-Length: " + std::to_string(body.size()) + "\r\n"
      "\r\n" + body;
}

/// INVITE whose body is an S/MIME multipart/signed structure: an opaque
/// envelopedData part followed by a base64 pkcs7 signature part.
inline std::string smime_invite() {
  const std::string body =
      "--992d915fef419824\r\n"
      "Content-Type: application/pkcs7-mime;smime-type=envelopeddata; name=smime.p7m\r\n"
      "Content-Disposition: attachment;handling=required;filename=smime.p7m\r\n"
      "Content-Transfer-Encoding: binary\r\n"
      "\r\n"
      "MIAGCSqGSIb3DQEHA6CAMIACAQAxggHmMIIB4gIBADCByTCBvDEL\r\n"
      "pZGF0YSBwbGFjZWhvbGRlciBvY3RldHMgZm9yIHRlc3RpbmcuLi4\r\n"
      "--992d915fef419824\r\n"
      "Content-Type: application/pkcs7-signature; name=smime.p7s\r\n"
      "Content-Transfer-Encoding: base64\r\n"
      "Content-Disposition: attachment; filename=smime.p7s;handling=required\r\n"
      "\r\n"
      "ghyHhHUujhJhJh77n8HHGTrfvbnj756tbB9HG4VQpFyF467GhIGfHfYT6\r\n"
      "QpFyF467GhIGfHfYT6 jH77n8HHGghyHhHUujhJh756tbB9HGTrfvbnj\r\n"
      "n8HHGTrfvhJhJh776tbB9HG4VQbnj7567GhIGfHfYT6ghyHhHUujpFyF4\r\n"
      "7GhIGfHfYT64VQbnj7565\r\n"
      "\r\n"
      "--992d915fef419824--";
  return
      "INVITE sip:bob@biloxi.example.com SIP/2.0\r\n"
      "Via: SIP/2.0/UDP 160.85.170.139:5060;branch=z9hG4bK4129d28b8904\r\n"
      "To: Bob <sip:bob@biloxi.example.com>\r\n"
      "From: Alice <sip:alice@atlanta.example.com>;tag=daa21162\r\n"
      "Call-ID: 392c3f2b568e92a8eb37d448886eddl1a@160.85.170.139\r\n"
      "CSeq: 1 INVITE\r\n"
      "Max-Forwards: 70\r\n"
      "Contact: <sip:alice@client.atlanta.example.com:5060>\r\n"
      "Content-Type: multipart/signed;boundary=992d915fef419824;micalg=sha1;"
      "protocol=application/pkcs7-signature\r\n"
      "Content-Length: " + std::to_string(body.size()) + "\r\n"
      "\r\n" + body;
}

/// Headers carrying trailing SP/HT runs: the whitespace-channel shape.
/// Line 1 ends [SP][SP][HT][SP][HT], the From line [HT][SP][HT], the To
/// line [HT][SP][HT][HT][SP][HT][SP][SP], the Call-ID line [SP][HT][SP][SP].
inline std::string whitespace_invite() {
  return
      "INVITE sip:bob@biloxi.example.com SIP/2.0  \t \t\r\n"
      "From: Alice <sip:alice@atlanta.example.com>;tag=9fxced76s1\t \t\r\n"
      "To: Bob <sip:bob@biloxi.example.com>\t \t\t \t  \r\n"
      "Call-ID: 3848276298220188511@atlanta.example.com \t  \r\n"
      "CSeq: 12345 INVITE\r\n"
      "\r\n";
}

/// The smallest well-formed carrier: a start line and no headers.
inline std::string minimal_options() { return "OPTIONS sip:x SIP/2.0\r\n\r\n"; }

}  // namespace fixtures
