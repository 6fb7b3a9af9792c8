#include <doctest.h>

#include <random>
#include <string>

#include "luce/address.hpp"
#include "luce/sha256.hpp"
#include "support/oracles.hpp"

using namespace luce;

TEST_CASE("sha256 known vectors") {
  CHECK(to_hex(sha256("")) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(to_hex(sha256("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(to_hex(sha256("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256 agrees with openssl across sizes") {
  std::mt19937_64 rng(7);
  for (std::size_t len : {0u, 1u, 55u, 56u, 63u, 64u, 65u, 127u, 1000u, 10000u}) {
    std::string data(len, '\0');
    for (auto& c : data) c = static_cast<char>(rng() & 0xff);
    CHECK(to_hex(sha256(data)) == oracles::openssl_sha256_hex(data));
  }
}

TEST_CASE("incremental updates match one-shot") {
  std::string data(1234, 'x');
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<char>('a' + i % 26);
  Sha256 h;
  h.update(data.substr(0, 100));
  h.update(data.substr(100, 500));
  h.update(data.substr(600));
  CHECK(h.finish() == sha256(data));
}

TEST_CASE("hex round trip") {
  Digest d = sha256("roundtrip");
  auto parsed = digest_from_hex(to_hex(d));
  REQUIRE(parsed.has_value());
  CHECK(*parsed == d);
  CHECK_FALSE(digest_from_hex("zz").has_value());
  CHECK_FALSE(digest_from_hex(to_hex(d).substr(1)).has_value());
}

TEST_CASE("addresses render as 0x hex and parse back") {
  Address a = Address::derive("someone");
  std::string s = a.str();
  CHECK(s.size() == 42);
  CHECK(s.substr(0, 2) == "0x");
  auto parsed = Address::parse(s);
  REQUIRE(parsed.has_value());
  CHECK(*parsed == a);
  CHECK(kZeroAddress.is_zero());
  CHECK_FALSE(a.is_zero());
  CHECK(Address::derive("someone") == a);
  CHECK(Address::derive("someone-else") != a);
}
