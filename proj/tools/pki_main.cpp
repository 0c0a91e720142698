// Self-contained certificate tooling: create trust anchors and issue entity
// certificates from them. Key files land next to the certificate files with
// owner-only permissions.

#include <CLI11.hpp>

#include <iostream>

#include "smcgw/crypto/identity.hpp"
#include "smcgw/wire/http.hpp"

using namespace smcgw;

int main(int argc, char** argv) {
  CLI::App app{"smcgw-pki: trust anchors and entity certificates"};
  app.require_subcommand(1);

  std::string out;
  std::string subject;
  std::string purpose;
  std::string anchor_prefix;
  int days = 365;

  auto* init = app.add_subcommand("init-anchor", "create a self-signed trust anchor");
  init->add_option("--out", out, "output path prefix (writes <out>.cert.json / <out>.key.json)")
      ->required();
  init->add_option("--subject", subject, "anchor subject")->default_val("anchor");
  init->add_option("--days", days, "validity in days")->default_val(3650);

  auto* issue = app.add_subcommand("issue", "issue an entity certificate signed by an anchor");
  issue->add_option("--anchor", anchor_prefix, "anchor path prefix")->required();
  issue->add_option("--out", out, "output path prefix")->required();
  issue->add_option("--subject", subject, "entity subject")->required();
  issue->add_option("--purpose", purpose, "usage-purpose statement (clients)")->default_val("");
  issue->add_option("--days", days, "validity in days")->default_val(365);

  auto* show = app.add_subcommand("fingerprint", "print a certificate fingerprint");
  std::string cert_path;
  show->add_option("cert", cert_path, "certificate file")->required();

  CLI11_PARSE(app, argc, argv);
  crypto::init();
  std::int64_t now = wire::system_now_s();

  try {
    if (init->parsed()) {
      auto id = crypto::generate_identity(subject, "", nullptr, now - 300, now + days * 86400LL);
      crypto::save_identity(id, out);
      std::cout << "anchor " << crypto::fingerprint(id.certificate) << " -> " << out
                << ".{cert,key}.json\n";
    } else if (issue->parsed()) {
      auto anchor = crypto::load_identity(anchor_prefix);
      auto id = crypto::generate_identity(subject, purpose, &anchor, now - 300, now + days * 86400LL);
      crypto::save_identity(id, out);
      std::cout << "certificate " << crypto::fingerprint(id.certificate) << " (subject " << subject
                << ") -> " << out << ".{cert,key}.json\n";
    } else if (show->parsed()) {
      std::cout << crypto::fingerprint(crypto::load_certificate(cert_path)) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
