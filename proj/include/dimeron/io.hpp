#pragma once

#include "dimeron/correlations.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dimeron {

/// 17 significant digits, enough to reproduce any double exactly.
std::string format_double(double v);

/// Writes via a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Minimal CSV assembly with a fixed header.
class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header);
    CsvWriter& field(double v);
    CsvWriter& field(long long v);
    CsvWriter& field(const std::string& v);
    CsvWriter& empty();
    void end_row();
    const std::string& str() const { return out_; }

private:
    std::string out_;
    bool first_ = true;
};

/// {"width": W, "height": H, "roi": [x0,y0,x1,y1], "shots": [[0|1,...], ...]}
std::string image_set_to_json(const ImageSet& set);
ImageSet image_set_from_json(const std::string& text);

}  // namespace dimeron
