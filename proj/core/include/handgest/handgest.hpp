#pragma once

#include "handgest/classifier.hpp"
#include "handgest/dataset.hpp"
#include "handgest/errors.hpp"
#include "handgest/eval.hpp"
#include "handgest/frame_io.hpp"
#include "handgest/gallery.hpp"
#include "handgest/geometry.hpp"
#include "handgest/landmarks.hpp"
