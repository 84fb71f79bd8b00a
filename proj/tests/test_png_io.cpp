#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "advmask/errors.hpp"
#include "advmask/png_io.hpp"
#include "advmask/rng.hpp"

using namespace advmask;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("RGB PNG round trip preserves quantized samples exactly") {
    Image img(9, 13, 3);
    Rng rng(2);
    for (double& v : img.data) v = rng.uniform();
    const std::string path = temp_path("advmask_test_rgb.png");
    write_png_rgb(path, img);
    const Image loaded = read_png(path);
    REQUIRE(loaded.same_shape(img));
    CHECK(max_abs_diff(loaded, quantized_copy(img)) == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("grayscale PNG round trip preserves 0/255 supports") {
    Image support(6, 7, 1);
    for (size_t i = 0; i < support.data.size(); ++i) support.data[i] = i % 3 == 0 ? 1.0 : 0.0;
    const std::string path = temp_path("advmask_test_gray.png");
    write_png_gray(path, support);
    const Image loaded = read_png(path);
    REQUIRE(loaded.channels == 1);
    CHECK(max_abs_diff(loaded, support) == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("reading a missing file throws IoError") {
    CHECK_THROWS_AS(read_png("/nonexistent/advmask.png"), IoError);
}

TEST_CASE("writers validate channel counts") {
    Image gray(4, 4, 1);
    Image rgb(4, 4, 3);
    CHECK_THROWS_AS(write_png_rgb(temp_path("x.png"), gray), ShapeMismatch);
    CHECK_THROWS_AS(write_png_gray(temp_path("x.png"), rgb), ShapeMismatch);
}
