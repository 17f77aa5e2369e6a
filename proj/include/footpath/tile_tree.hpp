#pragma once

#include <filesystem>
#include <vector>

#include "footpath/geo_tiles.hpp"

namespace footpath {

// {root}/{z}/{x}/{y}{ext}: the layout shared by the image cache and the mask trees.
std::filesystem::path tile_path(const std::filesystem::path& root, const TileId& t, const char* ext = ".png");

// Every well-formed {z}/{x}/{y}{ext} file under root, sorted row-major.
// Anything else in the tree (temp files, stray names) is ignored.
std::vector<TileId> list_tile_tree(const std::filesystem::path& root, const char* ext = ".png");

}  // namespace footpath
