#include "facloc/image.hpp"

#include <cctype>
#include <fstream>

#include "facloc/error.hpp"

namespace facloc {

namespace {

// Skips whitespace and '#' comment lines, then reads one unsigned integer.
int read_pnm_int(std::istream& in, const std::string& path) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF || !std::isdigit(c)) throw ParseError(path + ": malformed PNM header");
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

}  // namespace

GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open image: " + path);
    char magic[2];
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2')) {
        throw ParseError(path + ": not a PGM file");
    }
    const bool binary = magic[1] == '5';
    int w = read_pnm_int(in, path);
    int h = read_pnm_int(in, path);
    int maxval = read_pnm_int(in, path);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
        throw ParseError(path + ": unsupported PGM dimensions or maxval");
    }
    GrayImage img(w, h);
    if (binary) {
        in.read(reinterpret_cast<char*>(img.pixels.data()),
                static_cast<std::streamsize>(img.pixels.size()));
        if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
            throw ParseError(path + ": truncated PGM data");
        }
    } else {
        for (auto& px : img.pixels) {
            int v;
            if (!(in >> v) || v < 0 || v > maxval) {
                throw ParseError(path + ": truncated PGM data");
            }
            px = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write image: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw ParseError("failed writing image: " + path);
}

void save_ppm(const RgbImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write image: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw ParseError("failed writing image: " + path);
}

}  // namespace facloc
