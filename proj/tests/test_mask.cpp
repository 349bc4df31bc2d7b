#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kolab/error.hpp"
#include "kolab/mask.hpp"

using namespace kolab;

namespace {

// Independent restatement of the knockout prose, on roles rather than frame
// tags.
bool prose_allowed(KnockoutType kt, const TokenLayout& l, int q, int k) {
  if (k > q) return false;
  if (k == q) return true;
  const TokenRole rq = role_of(l, q), rk = role_of(l, k);
  switch (kt) {
    case KnockoutType::None: return true;
    case KnockoutType::LVK: return !(is_text(rq) && is_video(rk));
    case KnockoutType::VTK:
      return !(is_video(rq) && is_video(rk) &&
               std::get<VideoToken>(rq).frame != std::get<VideoToken>(rk).frame);
    case KnockoutType::VSK:
      return !(is_video(rq) && is_video(rk) &&
               std::get<VideoToken>(rq).frame == std::get<VideoToken>(rk).frame);
  }
  return false;
}

std::vector<TokenLayout> small_layouts() {
  std::vector<TokenLayout> out;
  for (int n = 1; n <= 4; ++n)
    for (int p = 1; p <= 4; ++p)
      for (int t = 0; t <= 3; ++t) out.push_back(build_layout(n, p, t));
  return out;
}

}  // namespace

TEST_CASE("knockout examples") {
  const auto l = build_layout(2, 3, 2);
  const int text0 = index_of(l, TextToken{0});
  CHECK_FALSE(allowed({l, KnockoutType::LVK}, text0, index_of(l, VideoToken{0, 0})));
  CHECK(allowed({l, KnockoutType::LVK}, text0 + 1, text0));

  const int f1k2 = index_of(l, VideoToken{1, 2});
  CHECK(allowed({l, KnockoutType::VTK}, f1k2, index_of(l, VideoToken{1, 0})));
  CHECK_FALSE(allowed({l, KnockoutType::VTK}, f1k2, index_of(l, VideoToken{0, 2})));
  CHECK(allowed({l, KnockoutType::VTK}, text0, index_of(l, VideoToken{0, 2})));

  CHECK_FALSE(allowed({l, KnockoutType::VSK}, f1k2, index_of(l, VideoToken{1, 0})));
  CHECK(allowed({l, KnockoutType::VSK}, f1k2, index_of(l, VideoToken{0, 1})));

  for (KnockoutType kt : {KnockoutType::None, KnockoutType::LVK, KnockoutType::VTK, KnockoutType::VSK})
    for (int q = 0; q < l.total_len(); ++q) CHECK(allowed({l, kt}, q, q));

  CHECK_THROWS_AS(allowed({l, KnockoutType::None}, 8, 0), Error);
  CHECK_THROWS_AS(allowed({l, KnockoutType::None}, 0, -1), Error);
}

TEST_CASE("VS-K on layout(2,3,1) removes two within-frame lower triangles") {
  const auto l = build_layout(2, 3, 1);
  int removed = 0;
  for (int q = 0; q < 7; ++q) {
    for (int k = 0; k < 7; ++k) {
      const bool causal = k <= q;
      const bool same_frame_lower = q < 6 && k < q && q / 3 == k / 3;
      CHECK(allowed({l, KnockoutType::VSK}, q, k) == (causal && !same_frame_lower));
      removed += same_frame_lower;
    }
  }
  CHECK(removed == 6);  // two blocks of 3 strictly-lower pairs
}

TEST_CASE("materialize_mask examples") {
  const auto l4 = build_layout(1, 4, 0);
  const auto m = materialize_mask({l4, KnockoutType::None});
  for (int q = 0; q < 4; ++q)
    for (int k = 0; k < 4; ++k) {
      if (k > q) CHECK(std::isinf(m.at(q, k)));
      else CHECK(m.at(q, k) == 0.0f);
    }
  const auto one = materialize_mask({build_layout(1, 1, 0), KnockoutType::VSK});
  CHECK(one.size == 1);
  CHECK(one.at(0, 0) == 0.0f);

  // LV-K on layout(2,2,2): only the 2x4 text->video block changes.
  const auto l = build_layout(2, 2, 2);
  const auto lvk = materialize_mask({l, KnockoutType::LVK});
  for (int q = 0; q < 6; ++q)
    for (int k = 0; k < 6; ++k) {
      const bool blocked = k > q || (q >= 4 && k < 4);
      CHECK(std::isinf(lvk.at(q, k)) == blocked);
    }
}

TEST_CASE("materialize_mask size guard") {
  const auto big = build_layout(1, kMaxDenseMask + 1, 0);
  try {
    materialize_mask({big, KnockoutType::None});
    FAIL("expected too-large");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooLarge);
  }
}

TEST_CASE("rule agrees with the prose on every pair, and with the dense mask") {
  for (const auto& l : small_layouts()) {
    for (KnockoutType kt : {KnockoutType::None, KnockoutType::LVK, KnockoutType::VTK, KnockoutType::VSK}) {
      const auto mask = materialize_mask({l, kt});
      for (int q = 0; q < l.total_len(); ++q)
        for (int k = 0; k < l.total_len(); ++k) {
          const bool a = allowed({l, kt}, q, k);
          REQUIRE(a == prose_allowed(kt, l, q, k));
          REQUIRE(a == (mask.at(q, k) == 0.0f));
          REQUIRE((a || std::isinf(mask.at(q, k))));
        }
    }
  }
}

TEST_CASE("mask agrees with rule exhaustively for S <= 64") {
  std::mt19937 rng(5);
  int checked = 0;
  while (checked < 40) {
    const int n = 1 + static_cast<int>(rng() % 8), p = 1 + static_cast<int>(rng() % 8),
              t = static_cast<int>(rng() % 10);
    if (n * p + t > 64) continue;
    const auto l = build_layout(n, p, t);
    for (KnockoutType kt : {KnockoutType::None, KnockoutType::LVK, KnockoutType::VTK, KnockoutType::VSK}) {
      const auto mask = materialize_mask({l, kt});
      for (int q = 0; q < l.total_len(); ++q)
        for (int k = 0; k < l.total_len(); ++k)
          REQUIRE(allowed({l, kt}, q, k) == (mask.at(q, k) == 0.0f));
    }
    ++checked;
  }
}

TEST_CASE("subset, non-empty rows, and disjoint partition of the causal triangle") {
  for (const auto& l : small_layouts()) {
    const int s = l.total_len();
    for (int q = 0; q < s; ++q) {
      for (KnockoutType kt : kKnockouts) {
        int row = 0;
        for (int k = 0; k < s; ++k) {
          if (allowed({l, kt}, q, k)) {
            REQUIRE(allowed({l, KnockoutType::None}, q, k));
            ++row;
          }
        }
        REQUIRE(row >= 1);
      }
      for (int k = 0; k <= q; ++k) {
        int removed_by = 0;
        for (KnockoutType kt : kKnockouts) removed_by += !allowed({l, kt}, q, k);
        // Each causal pair is removed by at most one knockout type.
        REQUIRE(removed_by <= 1);
      }
    }
    // Union of removed sets plus the pairs no knockout touches is the triangle.
    long removed_total = 0, untouched = 0;
    for (int q = 0; q < s; ++q)
      for (int k = 0; k <= q; ++k) {
        bool any = false;
        for (KnockoutType kt : kKnockouts) {
          const bool r = !allowed({l, kt}, q, k);
          removed_total += r;
          any = any || r;
        }
        untouched += !any;
      }
    CHECK(removed_total + untouched == static_cast<long>(s) * (s + 1) / 2);
  }
}

TEST_CASE("knockout names round trip") {
  for (KnockoutType kt : {KnockoutType::None, KnockoutType::LVK, KnockoutType::VTK, KnockoutType::VSK}) {
    CHECK(parse_knockout(std::string(1, code_of(kt))) == kt);
    CHECK(parse_knockout(name_of(kt)) == kt);
  }
  CHECK(parse_knockout("lvk") == KnockoutType::LVK);
  CHECK_THROWS_AS(parse_knockout("X"), Error);
}
