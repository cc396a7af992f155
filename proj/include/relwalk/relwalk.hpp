#ifndef RELWALK_RELWALK_HPP
#define RELWALK_RELWALK_HPP

#include "relation.hpp"
#include "walk.hpp"
#include "representation.hpp"
#include "diffusion.hpp"
#include "eigen.hpp"
#include "spectrum.hpp"
#include "garland.hpp"
#include "ergodic.hpp"
#include "models.hpp"

#endif
