#include "gridauth/grid.hpp"

#include "gridauth/entropy.hpp"
#include "gridauth/error.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace gridauth {

ImageId::ImageId(int id) : id_(static_cast<std::uint8_t>(id)) {
    if (id < 0 || id >= kImageCount) {
        throw ValidationError("image id out of range 0-24");
    }
}

GridLayout generate_layout(EntropySource& entropy) {
    std::array<int, kImageCount> ids{};
    std::iota(ids.begin(), ids.end(), 0);

    // Partial Fisher-Yates: the first 10 slots become a uniformly random
    // ordered selection.
    for (int i = 0; i < kGridSize; ++i) {
        const auto j = i + static_cast<int>(entropy.uniform(static_cast<std::uint32_t>(kImageCount - i)));
        std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
    }

    GridLayout layout;
    for (int i = 0; i < kGridSize; ++i) {
        layout.header[static_cast<std::size_t>(i)] = ImageId(ids[static_cast<std::size_t>(i)]);
    }
    layout.cells[0] = layout.header;

    constexpr int body = kGridSize * (kGridSize - 1);
    std::array<ImageId, body> pool{};
    std::size_t n = 0;
    for (int i = 0; i < kImageCount; ++i) {
        const ImageId id(ids[static_cast<std::size_t>(i)]);
        const int copies = i < kGridSize ? kCopiesPerImage - 1 : kCopiesPerImage;
        for (int c = 0; c < copies; ++c) {
            pool[n++] = id;
        }
    }

    for (int i = body - 1; i > 0; --i) {
        const auto j = static_cast<int>(entropy.uniform(static_cast<std::uint32_t>(i + 1)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }

    for (int k = 0; k < body; ++k) {
        layout.cells[static_cast<std::size_t>(1 + k / kGridSize)][static_cast<std::size_t>(k % kGridSize)] =
            pool[static_cast<std::size_t>(k)];
    }
    return layout;
}

std::optional<std::uint8_t> header_index(const GridLayout& layout, ImageId image) {
    const auto it = std::find(layout.header.begin(), layout.header.end(), image);
    if (it == layout.header.end()) {
        return std::nullopt;
    }
    return static_cast<std::uint8_t>(it - layout.header.begin());
}

ClickResult resolve_click(const GridLayout& layout, int row, int col) {
    if (row < 0 || row >= kGridSize || col < 0 || col >= kGridSize) {
        throw ValidationError("click coordinates out of range 0-9");
    }
    if (row == 0) {
        return ClickResult::make_header_cell();
    }
    const ImageId image = layout.cells[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    if (const auto idx = header_index(layout, image)) {
        return ClickResult::make_digit(*idx);
    }
    return ClickResult::make_garbage();
}

std::optional<std::string> check_layout(const GridLayout& layout) {
    if (layout.cells[0] != layout.header) {
        return "row 0 differs from header";
    }
    std::array<int, kImageCount> header_seen{};
    for (ImageId id : layout.header) {
        if (++header_seen[static_cast<std::size_t>(id.value())] > 1) {
            return "header id " + std::to_string(id.value()) + " repeated";
        }
    }
    std::array<int, kImageCount> body{};
    for (std::size_t r = 1; r < kGridSize; ++r) {
        for (ImageId id : layout.cells[r]) {
            ++body[static_cast<std::size_t>(id.value())];
        }
    }
    for (int id = 0; id < kImageCount; ++id) {
        const auto i = static_cast<std::size_t>(id);
        const int expected = header_seen[i] ? kCopiesPerImage - 1 : kCopiesPerImage;
        if (body[i] != expected) {
            return "image " + std::to_string(id) + " appears " + std::to_string(body[i]) +
                   " times below the header, expected " + std::to_string(expected);
        }
    }
    return std::nullopt;
}

} // namespace gridauth
