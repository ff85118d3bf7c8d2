#pragma once

// Umbrella header.

#include "error.hpp"
#include "exactfield.hpp"
#include "polynomial.hpp"
#include "extension.hpp"
#include "coextension.hpp"
#include "normalize.hpp"
#include "casimir.hpp"
#include "dynamics.hpp"
#include "stability.hpp"
#include "io.hpp"
