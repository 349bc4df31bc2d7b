#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "kolab/error.hpp"
#include "kolab/layout.hpp"

using namespace kolab;

TEST_CASE("build_layout lengths") {
  const auto paper = build_layout(32, 196, 100);
  CHECK(paper.total_len() == 6372);
  CHECK(paper.video_len() == 6272);
  CHECK(paper.is_video_index(6271));
  CHECK_FALSE(paper.is_video_index(6272));

  CHECK(build_layout(1, 1, 0).total_len() == 1);
}

TEST_CASE("build_layout rejects empty frames") {
  for (auto [n, p, t] : {std::tuple{0, 4, 2}, {3, 0, 2}, {3, 4, -1}}) {
    try {
      build_layout(n, p, t);
      FAIL("expected invalid-layout");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidLayout);
    }
  }
}

TEST_CASE("role_of on layout(3,4,2)") {
  const auto l = build_layout(3, 4, 2);
  CHECK(role_of(l, 7) == TokenRole{VideoToken{1, 3}});
  CHECK(role_of(l, 11) == TokenRole{VideoToken{2, 3}});
  CHECK(role_of(l, 12) == TokenRole{TextToken{0}});
  CHECK(role_of(l, 13) == TokenRole{TextToken{1}});
  CHECK_THROWS_AS(role_of(l, 14), Error);
  CHECK_THROWS_AS(role_of(l, -1), Error);
  try {
    role_of(l, 14);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Bounds);
  }
}

TEST_CASE("index_of rejects roles outside the layout") {
  const auto l = build_layout(3, 4, 2);
  CHECK_THROWS_AS(index_of(l, VideoToken{3, 0}), Error);
  CHECK_THROWS_AS(index_of(l, VideoToken{0, 4}), Error);
  CHECK_THROWS_AS(index_of(l, TextToken{2}), Error);
}

// Brute-force enumeration of every (frame, local) and text offset, checked
// against role_of/index_of.
TEST_CASE("role bijection and ordering over random layouts") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 40);
    const int p = 1 + static_cast<int>(rng() % 100);
    const int t = static_cast<int>(rng() % 50);
    if (n * p + t > 10000) continue;
    const auto l = build_layout(n, p, t);
    REQUIRE(l.total_len() == n * p + t);

    std::vector<TokenRole> expected;
    for (int f = 0; f < n; ++f)
      for (int k = 0; k < p; ++k) expected.push_back(VideoToken{f, k});
    for (int i = 0; i < t; ++i) expected.push_back(TextToken{i});

    int last_video = -1, first_text = l.total_len();
    for (int i = 0; i < l.total_len(); ++i) {
      const TokenRole r = role_of(l, i);
      REQUIRE(r == expected[i]);
      REQUIRE(index_of(l, r) == i);
      if (is_video(r)) last_video = std::max(last_video, i);
      else first_text = std::min(first_text, i);
    }
    CHECK(last_video < first_text);
  }
}
