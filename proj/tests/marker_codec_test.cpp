// Copyright 2026 The Tangiviz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tangiviz/marker_codec.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace tangiviz {
namespace {

std::string inner_row_string(const BitGrid& g, int k) {
  std::string s;
  for (int c = 1; c <= 5; ++c) s += g.at(k + 1, c) ? '1' : '0';
  return s;
}

std::vector<bool> flatten(const BitGrid& g) {
  std::vector<bool> v;
  for (int r = 0; r < kMarkerCells; ++r) {
    for (int c = 0; c < kMarkerCells; ++c) v.push_back(g.at(r, c));
  }
  return v;
}

int hamming(const BitGrid& a, const BitGrid& b) {
  int d = 0;
  for (int r = 0; r < kMarkerCells; ++r) {
    for (int c = 0; c < kMarkerCells; ++c) d += a.at(r, c) != b.at(r, c);
  }
  return d;
}

TEST(EncodeId, KnownRowPatterns) {
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(inner_row_string(encode_id(MarkerId(0)), k), "10000");
    EXPECT_EQ(inner_row_string(encode_id(MarkerId(1023)), k), "01110");
    EXPECT_EQ(inner_row_string(encode_id(MarkerId(682)), k), "01001");
  }
}

TEST(EncodeId, MostSignificantPairOnTop) {
  // 0b01'00'00'00'00: only the top row carries word(01).
  const BitGrid g = encode_id(MarkerId(256));
  EXPECT_EQ(inner_row_string(g, 0), "10111");
  for (int k = 1; k < 5; ++k) EXPECT_EQ(inner_row_string(g, k), "10000");
  EXPECT_EQ(inner_row_string(encode_id(MarkerId(3)), 4), "01110");
}

TEST(EncodeId, BorderIsBlack) {
  for (int id = 0; id < kDictionarySize; ++id) ASSERT_TRUE(encode_id(MarkerId(id)).border_is_black());
}

TEST(MarkerIdTest, RejectsOutOfRange) {
  EXPECT_THROW(MarkerId(1024), Error);
  EXPECT_THROW(MarkerId(-1), Error);
  try {
    MarkerId bad(5000);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IdOutOfRange);
  }
}

TEST(DecodeGrid, RecoversQuarterTurn) {
  const auto r = decode_grid(encode_id(MarkerId(0)).rotated(1), 0);
  EXPECT_EQ(r.id.value(), 0);
  EXPECT_EQ(r.rotation.quarter_turns, 1);
  EXPECT_EQ(r.bit_errors, 0);
}

TEST(DecodeGrid, CorrectsSingleFlipWithinTolerance) {
  for (int row = 1; row <= 5; ++row) {
    for (int col = 1; col <= 5; ++col) {
      BitGrid g = encode_id(MarkerId(413));
      g.flip(row, col);
      const auto r = decode_grid(g, 1);
      EXPECT_EQ(r.id.value(), 413);
      EXPECT_EQ(r.rotation.quarter_turns, 0);
      EXPECT_EQ(r.bit_errors, 1);
      EXPECT_THROW(decode_grid(g, 0), Error);
    }
  }
}

TEST(DecodeGrid, AllZeroInnerRowsHasNoValidCode) {
  BitGrid g = encode_id(MarkerId(0));
  for (int r = 1; r <= 5; ++r) {
    for (int c = 1; c <= 5; ++c) g.set(r, c, false);
  }
  // Oracle: string Hamming distance of 00000 to each codeword.
  int per_row = 99;
  for (const char* w : {"10000", "10111", "01001", "01110"}) {
    int d = 0;
    for (int i = 0; i < 5; ++i) d += w[i] != '0';
    per_row = std::min(per_row, d);
  }
  ASSERT_EQ(per_row, 1);
  ASSERT_EQ(5 * per_row, 5);
  try {
    decode_grid(g, 0);
    FAIL() << "expected NoValidCode";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoValidCode);
  }
}

TEST(DecodeGrid, WhiteBorderCellIsBadBorder) {
  BitGrid g = encode_id(MarkerId(17));
  g.set(0, 3, false);
  try {
    decode_grid(g, 1);
    FAIL() << "expected BadBorder";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadBorder);
  }
}

TEST(DecodeGrid, RoundTripEveryIdAndRotation) {
  for (int id = 0; id < kDictionarySize; ++id) {
    for (int r = 0; r < 4; ++r) {
      const BitGrid g = encode_id(MarkerId(id)).rotated(r);
      const auto out = decode_grid(g, 0);
      ASSERT_EQ(out.id.value(), id);
      // The reported rotation always restores the canonical grid, even for
      // a pattern with rotational symmetry.
      ASSERT_EQ(encode_id(out.id).rotated(out.rotation.quarter_turns), g);
      if (id != 1023) {
        ASSERT_EQ(out.rotation.quarter_turns, r) << "id " << id;
      }
    }
  }
}

TEST(DecodeGrid, OnlyId1023IsRotationallySymmetric) {
  // word(11) = 01110 is a palindrome, so the all-11 marker reads the same
  // after a half turn and its rotation is only known modulo 180 degrees.
  std::vector<int> symmetric;
  for (int id = 0; id < kDictionarySize; ++id) {
    const BitGrid g = encode_id(MarkerId(id));
    for (int r = 1; r < 4; ++r) {
      if (g.rotated(r) == g) {
        symmetric.push_back(id);
        EXPECT_EQ(r, 2);
        break;
      }
    }
  }
  EXPECT_EQ(symmetric, std::vector<int>{1023});
  const auto half = decode_grid(encode_id(MarkerId(1023)).rotated(2), 0);
  EXPECT_EQ(half.rotation.quarter_turns, 0);
}

TEST(Dictionary, EncodeIsInjectiveAndRotationsDistinctAcrossIds) {
  std::set<std::vector<bool>> plain;
  for (int id = 0; id < kDictionarySize; ++id) plain.insert(flatten(encode_id(MarkerId(id))));
  EXPECT_EQ(plain.size(), 1024u);

  // No rotation of one id equals any rotation of another id.
  std::map<std::vector<bool>, int> owner;
  for (int id = 0; id < kDictionarySize; ++id) {
    for (int r = 0; r < 4; ++r) {
      const auto key = flatten(encode_id(MarkerId(id)).rotated(r));
      auto [it, inserted] = owner.emplace(key, id);
      if (!inserted) {
        ASSERT_EQ(it->second, id) << "ids " << it->second << " and " << id << " collide";
      }
    }
  }
  EXPECT_EQ(owner.size(), 4094u);  // 4096 minus the two half-turn duplicates of id 1023
}

TEST(Dictionary, SingleFlipsKeepIdExceptHalfTurnNeighbours) {
  // Five id pairs sit one cell apart once the partner is turned 180 degrees
  // (a side effect of the palindromic word 01110). Every other single flip
  // of an upright marker decodes back to its own id at tolerance 1.
  struct Collision {
    int id, row, col, decoded;
  };
  const std::vector<Collision> expected = {
      {255, 1, 4, 1022}, {767, 1, 2, 1020}, {831, 2, 4, 1019}, {959, 2, 2, 1011}, {975, 3, 4, 1007},
      {1007, 3, 2, 975}, {1011, 4, 4, 959}, {1019, 4, 2, 831}, {1020, 5, 4, 767}, {1022, 5, 2, 255}};
  std::vector<Collision> found;
  for (int id = 0; id < kDictionarySize; ++id) {
    for (int row = 1; row <= 5; ++row) {
      for (int col = 1; col <= 5; ++col) {
        BitGrid g = encode_id(MarkerId(id));
        g.flip(row, col);
        const auto out = decode_grid(g, 1);
        if (out.id.value() != id) {
          found.push_back({id, row, col, out.id.value()});
          EXPECT_EQ(out.bit_errors, 0);
          EXPECT_EQ(out.rotation.quarter_turns, 2);
        }
      }
    }
  }
  ASSERT_EQ(found.size(), expected.size());
  for (std::size_t i = 0; i < found.size(); ++i) {
    EXPECT_EQ(found[i].id, expected[i].id);
    EXPECT_EQ(found[i].row, expected[i].row);
    EXPECT_EQ(found[i].col, expected[i].col);
    EXPECT_EQ(found[i].decoded, expected[i].decoded);
  }
}

TEST(DecodeGrid, MatchesBruteForceNearestMarker) {
  // Oracle: exhaustive minimum full-grid Hamming distance over all 4096 rotated markers.
  std::vector<BitGrid> all;
  for (int id = 0; id < kDictionarySize; ++id) {
    for (int r = 0; r < 4; ++r) all.push_back(encode_id(MarkerId(id)).rotated(r));
  }
  std::mt19937 rng(1234);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> pick(0, kDictionarySize - 1);
  for (int trial = 0; trial < 300; ++trial) {
    BitGrid g = encode_id(MarkerId(pick(rng))).rotated(trial % 4);
    const int flips = trial % 4;
    for (int f = 0; f < flips; ++f) g.flip(1 + pick(rng) % 5, 1 + pick(rng) % 5);
    if (trial % 7 == 0) {
      for (int r = 1; r <= 5; ++r) {
        for (int c = 1; c <= 5; ++c) g.set(r, c, coin(rng));
      }
    }
    int best = 99;
    for (const auto& m : all) best = std::min(best, hamming(g, m));
    for (int tol = 0; tol <= kMaxTolerance; ++tol) {
      if (best <= tol) {
        const auto out = decode_grid(g, tol);
        EXPECT_EQ(out.bit_errors, best);
        EXPECT_EQ(hamming(g, encode_id(out.id).rotated(out.rotation.quarter_turns)), best);
      } else {
        EXPECT_THROW(decode_grid(g, tol), Error);
      }
    }
  }
}

TEST(RenderMarker, UnitCellMatchesGrid) {
  const Image img = render_marker(MarkerId(0), 1);
  ASSERT_EQ(img.width(), 7);
  ASSERT_EQ(img.height(), 7);
  const BitGrid g = encode_id(MarkerId(0));
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 7; ++x) EXPECT_EQ(img.at(x, y), g.at(y, x) ? 0 : 255);
  }
}

TEST(RenderMarker, OuterRingIsBlack) {
  const Image img = render_marker(MarkerId(777), 10);
  ASSERT_EQ(img.width(), 70);
  ASSERT_EQ(img.height(), 70);
  for (int y = 0; y < 70; ++y) {
    for (int x = 0; x < 70; ++x) {
      if (x < 10 || y < 10 || x >= 60 || y >= 60) {
        ASSERT_EQ(img.at(x, y), 0);
      }
    }
  }
}

TEST(RenderMarker, CellCentersReadBack) {
  for (int id : {0, 1, 413, 682, 999, 1023}) {
    const Image img = render_marker(MarkerId(id), 9);
    BitGrid read;
    for (int r = 0; r < 7; ++r) {
      for (int c = 0; c < 7; ++c) read.set(r, c, img.at(c * 9 + 4, r * 9 + 4) == 0);
    }
    EXPECT_EQ(read, encode_id(MarkerId(id)));
  }
}

TEST(RenderMarker, RejectsBadArguments) {
  EXPECT_THROW(render_marker(MarkerId(1), 0), Error);
}

}  // namespace
}  // namespace tangiviz
