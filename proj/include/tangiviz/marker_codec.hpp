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

#ifndef TANGIVIZ_MARKER_CODEC_HPP_
#define TANGIVIZ_MARKER_CODEC_HPP_

// Square 7x7 fiducial markers: a one-cell black border around a 5x5 data
// region. Each data row carries two id bits as a 5-bit codeword, giving a
// 10-bit id space (1024 markers). Codewords are pairwise >= 3 bits apart so a
// single flipped cell per marker is still recoverable.

#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <string>

#include "tangiviz/error.hpp"
#include "tangiviz/image.hpp"

namespace tangiviz {

inline constexpr int kMarkerCells = 7;
inline constexpr int kDataCells = 5;
inline constexpr int kDictionarySize = 1024;
inline constexpr int kMaxTolerance = 1;

class MarkerId {
 public:
  constexpr MarkerId() = default;
  explicit MarkerId(int value) : value_(value) {
    if (value < 0 || value >= kDictionarySize) {
      throw Error(ErrorCode::IdOutOfRange, "marker id " + std::to_string(value) + " not in [0, 1023]");
    }
  }
  constexpr int value() const noexcept { return value_; }
  friend constexpr auto operator<=>(MarkerId, MarkerId) = default;

 private:
  int value_ = 0;
};

/// Counterclockwise quarter turns.
struct Rotation {
  int quarter_turns = 0;
  friend constexpr bool operator==(Rotation, Rotation) = default;
};

/// 7x7 cells, row 0 on top, column 0 on the left; true = black.
class BitGrid {
 public:
  bool at(int row, int col) const { return cells_[row * kMarkerCells + col]; }
  void set(int row, int col, bool black) { cells_[row * kMarkerCells + col] = black; }
  void flip(int row, int col) { set(row, col, !at(row, col)); }

  bool border_is_black() const {
    for (int i = 0; i < kMarkerCells; ++i) {
      if (!at(0, i) || !at(kMarkerCells - 1, i) || !at(i, 0) || !at(i, kMarkerCells - 1)) return false;
    }
    return true;
  }

  /// Inner row k (0..4) packed with the leftmost cell as the most significant of 5 bits.
  std::uint8_t inner_row(int k) const {
    std::uint8_t word = 0;
    for (int c = 0; c < kDataCells; ++c) word = static_cast<std::uint8_t>((word << 1) | (at(k + 1, c + 1) ? 1 : 0));
    return word;
  }

  /// Rotated copy, counterclockwise as displayed (row 0 at the top).
  BitGrid rotated(int quarter_turns) const {
    BitGrid out = *this;
    for (int t = 0; t < ((quarter_turns % 4) + 4) % 4; ++t) {
      BitGrid next;
      for (int r = 0; r < kMarkerCells; ++r) {
        for (int c = 0; c < kMarkerCells; ++c) next.set(r, c, out.at(c, kMarkerCells - 1 - r));
      }
      out = next;
    }
    return out;
  }

  friend bool operator==(const BitGrid&, const BitGrid&) = default;

 private:
  std::array<bool, kMarkerCells * kMarkerCells> cells_{};
};

// word(00)=10000, word(01)=10111, word(10)=01001, word(11)=01110
inline constexpr std::array<std::uint8_t, 4> kRowCodewords = {0b10000, 0b10111, 0b01001, 0b01110};

inline BitGrid encode_id(MarkerId id) {
  BitGrid grid;
  for (int r = 0; r < kMarkerCells; ++r) {
    for (int c = 0; c < kMarkerCells; ++c) grid.set(r, c, true);
  }
  for (int k = 0; k < kDataCells; ++k) {
    const int pair = (id.value() >> (8 - 2 * k)) & 0b11;
    const std::uint8_t word = kRowCodewords[pair];
    for (int c = 0; c < kDataCells; ++c) grid.set(k + 1, c + 1, (word >> (kDataCells - 1 - c)) & 1);
  }
  return grid;
}

struct DecodeResult {
  MarkerId id;
  Rotation rotation;
  int bit_errors = 0;
};

namespace detail {

struct RowMatch {
  int pair = 0;
  int distance = 0;
};

inline RowMatch nearest_codeword(std::uint8_t word) {
  RowMatch best{0, std::numeric_limits<int>::max()};
  for (int p = 0; p < 4; ++p) {
    const int d = std::popcount(static_cast<unsigned>(word ^ kRowCodewords[p]));
    if (d < best.distance) best = {p, d};
  }
  return best;
}

}  // namespace detail

/// Finds the quarter-turn count r such that `grid` == rotated(encode_id(id), r).
/// Ties go to the smallest r.
inline DecodeResult decode_grid(const BitGrid& grid, int tolerance = 0) {
  if (!grid.border_is_black()) throw Error(ErrorCode::BadBorder, "marker border has white cells");

  int best_distance = std::numeric_limits<int>::max();
  int best_id = 0;
  int best_turns = 0;
  for (int r = 0; r < 4; ++r) {
    // Undo r counterclockwise turns.
    const BitGrid canonical = grid.rotated(4 - r);
    int distance = 0;
    int id = 0;
    for (int k = 0; k < kDataCells; ++k) {
      const auto match = detail::nearest_codeword(canonical.inner_row(k));
      distance += match.distance;
      id = (id << 2) | match.pair;
    }
    if (distance < best_distance) {
      best_distance = distance;
      best_id = id;
      best_turns = r;
    }
  }
  if (best_distance > tolerance) {
    throw Error(ErrorCode::NoValidCode, "best Hamming distance " + std::to_string(best_distance) +
                                            " exceeds tolerance " + std::to_string(tolerance));
  }
  return {MarkerId(best_id), Rotation{best_turns}, best_distance};
}

/// Black = 0, white = 255, no quiet zone.
inline Image render_marker(MarkerId id, int cell_px) {
  if (cell_px < 1) throw Error(ErrorCode::InvalidArgument, "cell_px must be >= 1");
  const BitGrid grid = encode_id(id);
  const int side = kMarkerCells * cell_px;
  Image img(side, side, 1, std::uint8_t{255});
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      if (grid.at(y / cell_px, x / cell_px)) img.at(x, y) = 0;
    }
  }
  return img;
}

}  // namespace tangiviz

#endif  // TANGIVIZ_MARKER_CODEC_HPP_
