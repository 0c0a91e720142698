#include "smcgw/crypto/identity.hpp"

#include <sodium.h>
#include <sys/stat.h>

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace smcgw::crypto {

void init() {
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
}

Fingerprint fingerprint(const Certificate& cert) {
  std::string bytes = canonical_dump(nlohmann::json(cert));
  unsigned char digest[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(digest, reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
  return to_hex(digest, sizeof digest);
}

Identity generate_identity(const std::string& subject, const std::string& purpose,
                           const Identity* issuer, std::int64_t not_before,
                           std::int64_t not_after) {
  init();
  if (not_before >= not_after) throw std::invalid_argument("certificate validity window is empty");

  unsigned char pk[crypto_sign_PUBLICKEYBYTES];
  unsigned char sk[crypto_sign_SECRETKEYBYTES];
  crypto_sign_keypair(pk, sk);

  Identity id;
  id.certificate.public_key.assign(pk, pk + sizeof pk);
  id.certificate.subject = subject;
  id.certificate.purpose = purpose;
  id.certificate.not_before = not_before;
  id.certificate.not_after = not_after;
  id.certificate.issuer_fpr = issuer ? fingerprint(issuer->certificate) : "";
  id.secret_key.bytes.assign(sk, sk + sizeof sk);

  const SecretKey& signing_key = issuer ? issuer->secret_key : id.secret_key;
  id.certificate.sig = sign(signing_key, canonical_dump(id.certificate.signing_payload()));
  sodium_memzero(sk, sizeof sk);
  return id;
}

Signature sign(const SecretKey& key, std::string_view message) {
  if (key.bytes.size() != crypto_sign_SECRETKEYBYTES) throw std::invalid_argument("bad secret key size");
  unsigned char sig[crypto_sign_BYTES];
  crypto_sign_detached(sig, nullptr, reinterpret_cast<const unsigned char*>(message.data()),
                       message.size(), key.bytes.data());
  return Signature{Bytes(sig, sig + sizeof sig)};
}

bool verify(const Signature& sig, const Certificate& cert, std::string_view message) {
  if (sig.bytes.size() != crypto_sign_BYTES) return false;
  if (cert.public_key.size() != crypto_sign_PUBLICKEYBYTES) return false;
  return crypto_sign_verify_detached(sig.bytes.data(),
                                     reinterpret_cast<const unsigned char*>(message.data()),
                                     message.size(), cert.public_key.data()) == 0;
}

bool verify_chain(const Certificate& cert, const std::vector<Certificate>& anchors,
                  std::int64_t now) {
  if (now < cert.not_before || now > cert.not_after) return false;
  std::string payload = canonical_dump(cert.signing_payload());
  if (cert.self_signed()) {
    // Anchors are trusted by configuration, not by their own signature alone.
    for (const Certificate& anchor : anchors) {
      if (anchor == cert) return verify(cert.sig, cert, payload);
    }
    return false;
  }
  for (const Certificate& anchor : anchors) {
    if (fingerprint(anchor) != cert.issuer_fpr) continue;
    if (now < anchor.not_before || now > anchor.not_after) continue;
    return verify(cert.sig, anchor, payload);
  }
  return false;
}

namespace {

struct BoxKeys {
  unsigned char pk[crypto_box_PUBLICKEYBYTES];
};

bool curve_public_key(const Certificate& cert, BoxKeys& out) {
  if (cert.public_key.size() != crypto_sign_PUBLICKEYBYTES) return false;
  return crypto_sign_ed25519_pk_to_curve25519(out.pk, cert.public_key.data()) == 0;
}

}  // namespace

Bytes encrypt_for(const Certificate& cert, std::string_view plaintext) {
  BoxKeys keys;
  if (!curve_public_key(cert, keys)) throw std::invalid_argument("certificate key unusable for encryption");
  Bytes out(plaintext.size() + crypto_box_SEALBYTES);
  if (crypto_box_seal(out.data(), reinterpret_cast<const unsigned char*>(plaintext.data()),
                      plaintext.size(), keys.pk) != 0) {
    throw std::runtime_error("sealed box encryption failed");
  }
  return out;
}

std::optional<std::string> decrypt(const SecretKey& key, const Certificate& own_cert,
                                   const Bytes& ciphertext) {
  if (ciphertext.size() < crypto_box_SEALBYTES) return std::nullopt;
  if (key.bytes.size() != crypto_sign_SECRETKEYBYTES) return std::nullopt;
  BoxKeys keys;
  if (!curve_public_key(own_cert, keys)) return std::nullopt;
  unsigned char curve_sk[crypto_box_SECRETKEYBYTES];
  if (crypto_sign_ed25519_sk_to_curve25519(curve_sk, key.bytes.data()) != 0) return std::nullopt;
  std::string plain(ciphertext.size() - crypto_box_SEALBYTES, '\0');
  int rc = crypto_box_seal_open(reinterpret_cast<unsigned char*>(plain.data()), ciphertext.data(),
                                ciphertext.size(), keys.pk, curve_sk);
  sodium_memzero(curve_sk, sizeof curve_sk);
  if (rc != 0) return std::nullopt;
  return plain;
}

void save_certificate(const Certificate& cert, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << nlohmann::json{{"certificate", cert}}.dump(2) << "\n";
}

Certificate load_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  return j.at("certificate").get<Certificate>();
}

void save_identity(const Identity& id, const std::string& path_prefix) {
  save_certificate(id.certificate, path_prefix + ".cert.json");
  std::string key_path = path_prefix + ".key.json";
  {
    std::ofstream out(key_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + key_path);
    out << nlohmann::json{{"certificate", id.certificate},
                          {"secret_key", to_hex(id.secret_key.bytes)}}
               .dump(2)
        << "\n";
  }
#ifndef _WIN32
  // Private keys are readable only by the owning daemon.
  if (chmod(key_path.c_str(), 0600) != 0) throw std::runtime_error("cannot chmod " + key_path);
#endif
}

Identity load_identity(const std::string& path_prefix) {
  std::string key_path = path_prefix + ".key.json";
  std::ifstream in(key_path);
  if (!in) throw std::runtime_error("cannot read " + key_path);
  nlohmann::json j = nlohmann::json::parse(in);
  Identity id;
  id.certificate = j.at("certificate").get<Certificate>();
  id.secret_key.bytes = from_hex(j.at("secret_key").get<std::string>());
  return id;
}

}  // namespace smcgw::crypto
