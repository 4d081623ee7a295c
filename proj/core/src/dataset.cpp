#include "relight/dataset.hpp"

#include "relight/errors.hpp"

#include <algorithm>

namespace relight {

namespace fs = std::filesystem;

std::vector<fs::path> scan_images(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError{"not a directory: " + dir.string()};
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator{dir}) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".ppm") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return out;
}

Dataset scan_dataset(const fs::path& root) {
    if (!fs::is_directory(root)) throw IoError{"dataset root is not a directory: " + root.string()};
    Dataset ds;
    const fs::path low = root / "low";
    if (fs::is_directory(low))
        ds.low = scan_images(low);
    else
        ds.low = scan_images(root); // flat directory of inputs
    if (ds.low.empty()) throw IoError{"no input images under " + root.string()};
    const fs::path high = root / "high";
    if (fs::is_directory(high)) ds.high = scan_images(high);
    return ds;
}

std::optional<fs::path> Dataset::reference_for(const fs::path& low_img) const {
    for (const fs::path& h : high)
        if (h.filename() == low_img.filename()) return h;
    return std::nullopt;
}

std::vector<ImageTensor> load_images(const std::vector<fs::path>& paths) {
    std::vector<ImageTensor> out;
    out.reserve(paths.size());
    for (const fs::path& p : paths) out.push_back(load_image(p));
    return out;
}

} // namespace relight
