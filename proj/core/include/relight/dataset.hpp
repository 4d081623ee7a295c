#pragma once

#include "relight/image.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace relight {

/// Sorted image files (*.png, *.ppm) directly inside dir.
std::vector<std::filesystem::path> scan_images(const std::filesystem::path& dir);

/// Dataset layout: <root>/low/ holds the inputs; <root>/high/ optionally
/// holds references matched by filename.
struct Dataset {
    std::vector<std::filesystem::path> low;  // sorted
    std::vector<std::filesystem::path> high; // sorted; may be empty

    /// Reference with the same filename as the given low image, if any.
    std::optional<std::filesystem::path> reference_for(const std::filesystem::path& low_img) const;
};

Dataset scan_dataset(const std::filesystem::path& root);

std::vector<ImageTensor> load_images(const std::vector<std::filesystem::path>& paths);

} // namespace relight
