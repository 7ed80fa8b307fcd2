#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace gridauth {

class EntropySource;

inline constexpr int kGridSize = 10;      // rows and columns
inline constexpr int kImageCount = 25;    // distinct original images
inline constexpr int kCopiesPerImage = 4; // each image appears 4 times in 100 cells

// Index of one of the 25 original images. Mapping to picture bytes lives in
// the UI asset manifest, never here.
class ImageId {
public:
    constexpr ImageId() = default;
    // Throws ValidationError outside 0..24.
    explicit ImageId(int id);

    constexpr int value() const { return id_; }

    friend constexpr bool operator==(ImageId, ImageId) = default;

private:
    std::uint8_t id_ = 0;
};

// One challenge instance. Row 0 of `cells` mirrors `header`; header index i
// denotes digit i.
struct GridLayout {
    using Row = std::array<ImageId, kGridSize>;

    Row header{};
    std::array<Row, kGridSize> cells{};

    friend bool operator==(const GridLayout&, const GridLayout&) = default;
};

class ClickResult {
public:
    enum class Kind { digit, garbage, header_cell };

    static ClickResult make_digit(std::uint8_t value) { return ClickResult(Kind::digit, value); }
    static ClickResult make_garbage() { return ClickResult(Kind::garbage, 0); }
    static ClickResult make_header_cell() { return ClickResult(Kind::header_cell, 0); }

    Kind kind() const { return kind_; }
    // Only meaningful when kind() == Kind::digit.
    std::optional<std::uint8_t> digit() const {
        return kind_ == Kind::digit ? std::optional<std::uint8_t>(value_) : std::nullopt;
    }

    friend bool operator==(const ClickResult&, const ClickResult&) = default;

private:
    ClickResult(Kind k, std::uint8_t v) : kind_(k), value_(v) {}
    Kind kind_;
    std::uint8_t value_;
};

// Picks 10 header ids without replacement, then shuffles the 90-cell multiset
// (3 copies of each header id, 4 of each other id) into rows 1..9.
GridLayout generate_layout(EntropySource& entropy);

// Fresh independent layout drawn after every accepted click.
inline GridLayout reshuffle_after_click(EntropySource& entropy) { return generate_layout(entropy); }

// Throws ValidationError if row or col is outside 0..9.
ClickResult resolve_click(const GridLayout& layout, int row, int col);

// Index of `image` in the header, if present.
std::optional<std::uint8_t> header_index(const GridLayout& layout, ImageId image);

// Empty if every composition invariant holds, otherwise a description of the
// first violation.
std::optional<std::string> check_layout(const GridLayout& layout);

} // namespace gridauth
