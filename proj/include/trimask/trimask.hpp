#pragma once

#include "trimask/annotations.hpp"
#include "trimask/batch.hpp"
#include "trimask/binary_mask.hpp"
#include "trimask/errors.hpp"
#include "trimask/files.hpp"
#include "trimask/geometry.hpp"
#include "trimask/image_io.hpp"
#include "trimask/mask_generation.hpp"
#include "trimask/metrics.hpp"
#include "trimask/rasterizer.hpp"
#include "trimask/session.hpp"
