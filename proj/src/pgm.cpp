#include "adamine/pgm.hpp"

#include <cctype>
#include <fstream>

#include "adamine/errors.hpp"

namespace adamine {

void write_pgm(const std::string& path, const PgmImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P5\n" << img.cols << " " << img.rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw IoError("short write: " + path);
}

namespace {

// single whitespace-or-comment-separated token from the PGM header
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

}  // namespace

PgmImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  if (next_token(in) != "P5") throw FormatError("not a P5 graymap: " + path);
  std::string w = next_token(in), h = next_token(in), mx = next_token(in);
  size_t cols, rows;
  long maxval;
  try {
    cols = std::stoul(w);
    rows = std::stoul(h);
    maxval = std::stol(mx);
  } catch (const std::exception&) {
    throw FormatError("bad PGM header: " + path);
  }
  if (cols == 0 || rows == 0 || maxval <= 0 || maxval > 255)
    throw FormatError("unsupported PGM header: " + path);
  PgmImage img;
  img.rows = rows;
  img.cols = cols;
  img.pixels.resize(rows * cols);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw FormatError("truncated PGM payload: " + path);
  return img;
}

}  // namespace adamine
