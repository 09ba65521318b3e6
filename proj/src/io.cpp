#include "dimeron/io.hpp"

#include "dimeron/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace dimeron {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.parent_path() / (path.filename().string() + ".tmp" + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out)
            throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot move output into place at " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) {
    for (const auto& h : header)
        field(h);
    end_row();
}

CsvWriter& CsvWriter::field(const std::string& v) {
    if (!first_)
        out_ += ',';
    out_ += v;
    first_ = false;
    return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(format_double(v)); }
CsvWriter& CsvWriter::field(long long v) { return field(std::to_string(v)); }
CsvWriter& CsvWriter::empty() { return field(std::string()); }

void CsvWriter::end_row() {
    out_ += '\n';
    first_ = true;
}

std::string image_set_to_json(const ImageSet& set) {
    nlohmann::ordered_json j;
    j["width"] = set.width;
    j["height"] = set.height;
    j["roi"] = {set.roi.x0, set.roi.y0, set.roi.x1, set.roi.y1};
    auto shots = nlohmann::ordered_json::array();
    for (const auto& im : set.images) {
        auto row = nlohmann::ordered_json::array();
        for (auto v : im.occupancy)
            row.push_back(static_cast<int>(v));
        shots.push_back(std::move(row));
    }
    j["shots"] = std::move(shots);
    return j.dump() + "\n";
}

ImageSet image_set_from_json(const std::string& text) {
    ImageSet set;
    try {
        const auto j = nlohmann::json::parse(text);
        set.width = j.at("width").get<int>();
        set.height = j.at("height").get<int>();
        const auto roi = j.at("roi").get<std::vector<int>>();
        if (roi.size() != 4)
            throw ConfigError("image set: roi must have four entries [x0,y0,x1,y1]");
        set.roi = {roi[0], roi[1], roi[2], roi[3]};
        for (const auto& shot : j.at("shots")) {
            if (set.width < 1 || set.height < 1)
                throw ConfigError("image set: dimensions must be at least 1x1");
            LatticeImage im(set.width, set.height, 0);
            const auto values = shot.get<std::vector<int>>();
            if (values.size() != im.occupancy.size())
                throw ConfigError("image set: shot length does not match width*height");
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (values[i] != 0 && values[i] != 1)
                    throw ConfigError("image set: occupancies must be 0 or 1");
                im.occupancy[i] = static_cast<std::uint8_t>(values[i]);
            }
            set.images.push_back(std::move(im));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("image set: malformed JSON: ") + e.what());
    }
    set.validate();
    return set;
}

}  // namespace dimeron
