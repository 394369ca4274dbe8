//! A three-room 2D playground with a movable object and a noisy TV.
//!
//! Topology: `Tv <-> Start <-> Object`. The agent controls a gripper with
//! planar moves and an open/close command. In the Object room the gripper can
//! grab and carry a block; in the TV room closing the gripper next to the TV
//! switches it on, after which the screen pattern and the room background are
//! re-randomized at a fixed per-step rate until the next reset.
//!
//! Positions are room-local coordinates in `[0, 1]²` with `y` pointing down
//! (row direction of the rendered image).

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::image::{Image, Rgb};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Room {
    Start,
    Object,
    Tv,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub room: Room,
    pub gripper: [f64; 2],
    pub gripper_closed: bool,
    /// Position inside the Object room; the object never leaves it.
    pub object: [f64; 2],
    pub holding: bool,
    pub tv_on: bool,
    /// Only consulted while `tv_on`.
    pub tv_pattern_seed: u64,
    pub background_variant: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub dx: f64,
    pub dy: f64,
    /// Positive closes the gripper, zero or negative opens it.
    pub grip: f64,
}

impl Action {
    pub const fn new(dx: f64, dy: f64, grip: f64) -> Self {
        Self { dx, dy, grip }
    }

    /// Clamps each component into its range; non-finite components become 0.
    pub fn clamped(self, max_step: f64) -> Self {
        let c = |v: f64, lim: f64| if v.is_finite() { v.clamp(-lim, lim) } else { 0.0 };
        Self {
            dx: c(self.dx, max_step),
            dy: c(self.dy, max_step),
            grip: c(self.grip, 1.0),
        }
    }

    pub fn random<R: Rng + ?Sized>(max_step: f64, rng: &mut R) -> Self {
        Self {
            dx: rng.gen_range(-max_step..=max_step),
            dy: rng.gen_range(-max_step..=max_step),
            grip: rng.gen_range(-1.0..=1.0),
        }
    }
}

/// Kinematic and rendering constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub image_size: usize,
    pub max_step: f64,
    pub grab_radius: f64,
    pub tv_radius: f64,
    pub door_width: f64,
    pub tv_resample_prob: f64,
    pub n_background_variants: u8,
    /// When false the TV can never be switched on (used for evaluation).
    pub tv_enabled: bool,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            image_size: 24,
            max_step: 0.1,
            grab_radius: 0.15,
            tv_radius: 0.15,
            door_width: 0.2,
            tv_resample_prob: 0.1,
            n_background_variants: 5,
            tv_enabled: true,
        }
    }
}

pub const START_POSITION: [f64; 2] = [0.5, 0.5];
pub const OBJECT_HOME: [f64; 2] = [0.5, 0.5];
/// Screen rectangle `[x0, x1) × [y0, y1)` in TV-room coordinates.
pub const TV_RECT: [f64; 4] = [0.2, 0.8, 0.1, 0.45];
pub const TV_CENTER: [f64; 2] = [0.5, 0.275];
const START_MARKERS: [[f64; 2]; 2] = [[0.15, 0.85], [0.85, 0.85]];

const START_BG: Rgb = [0.85, 0.85, 0.72];
const OBJECT_BG: Rgb = [0.70, 0.84, 0.95];
const TV_BGS: [Rgb; 5] = [
    [0.55, 0.38, 0.58],
    [0.92, 0.62, 0.30],
    [0.34, 0.62, 0.38],
    [0.36, 0.46, 0.82],
    [0.82, 0.32, 0.36],
];
const WALL: Rgb = [0.22, 0.22, 0.22];
const MARKER: Rgb = [0.55, 0.50, 0.10];
const GRIPPER_OPEN: Rgb = [0.95, 0.10, 0.10];
const GRIPPER_CLOSED: Rgb = [0.45, 0.02, 0.02];
const OBJECT_COLOR: Rgb = [0.08, 0.45, 0.08];
const TV_OFF: Rgb = [0.0, 0.0, 0.0];
const TV_BLOCK_PX: usize = 4;

/// Tags for what the simulator reports as visible in the current room.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Entity {
    Gripper,
    Object,
    TvOff,
    TvOn,
    StartMarkers,
}

/// Named target locations used by the evaluation goals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Location {
    Center,
    NorthWest,
    NorthEast,
    SouthWest,
    SouthEast,
}

impl Location {
    pub const ALL: [Location; 5] = [
        Location::Center,
        Location::NorthWest,
        Location::NorthEast,
        Location::SouthWest,
        Location::SouthEast,
    ];

    pub fn position(self) -> [f64; 2] {
        match self {
            Location::Center => [0.5, 0.5],
            Location::NorthWest => [0.2, 0.2],
            Location::NorthEast => [0.8, 0.2],
            Location::SouthWest => [0.2, 0.8],
            Location::SouthEast => [0.8, 0.8],
        }
    }
}

/// One evaluation goal: where the gripper and the object must end up.
#[derive(Clone, Debug, PartialEq)]
pub struct GoalSpec {
    pub gripper_location: Location,
    pub object_location: Location,
    pub gripper_target: [f64; 2],
    pub object_target: [f64; 2],
    /// The synthetic state the goal image was rendered from.
    pub state: EnvState,
    pub image: Image,
}

/// Strict L∞ threshold for a position to count as reached.
pub const SUCCESS_TOLERANCE: f64 = 0.2;

#[derive(Clone, Debug, Default)]
pub struct Env {
    config: EnvConfig,
}

impl Env {
    pub fn new(config: EnvConfig) -> Self {
        Self { config }
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    /// Initial state. The seed only fills the (unused while off) TV pattern
    /// slot, so every reset renders identically.
    pub fn reset(&self, seed: u64) -> EnvState {
        EnvState {
            room: Room::Start,
            gripper: START_POSITION,
            gripper_closed: false,
            object: OBJECT_HOME,
            holding: false,
            tv_on: false,
            tv_pattern_seed: seed,
            background_variant: 0,
        }
    }

    pub fn step<R: Rng + ?Sized>(&self, state: &EnvState, action: Action, rng: &mut R) -> EnvState {
        let cfg = &self.config;
        let a = action.clamped(cfg.max_step);
        let mut s = *state;
        let was_on = s.tv_on;

        let mut x = s.gripper[0] + a.dx;
        let y = (s.gripper[1] + a.dy).clamp(0.0, 1.0);
        let in_door = (y - 0.5).abs() <= cfg.door_width / 2.0;
        let entered = match s.room {
            Room::Start if x > 1.0 && in_door => Some((Room::Object, x - 1.0)),
            Room::Start if x < 0.0 && in_door => Some((Room::Tv, x + 1.0)),
            Room::Object if x < 0.0 && in_door => Some((Room::Start, x + 1.0)),
            Room::Tv if x > 1.0 && in_door => Some((Room::Start, x - 1.0)),
            _ => None,
        };
        if let Some((room, nx)) = entered {
            if s.room == Room::Object && s.holding {
                // The object stays behind at the doorway.
                s.holding = false;
                s.object = [0.0, y];
            }
            s.room = room;
            x = nx;
        }
        s.gripper = [x.clamp(0.0, 1.0), y];

        s.gripper_closed = a.grip > 0.0;
        if !s.gripper_closed {
            s.holding = false;
        } else if s.room == Room::Object
            && !s.holding
            && dist(s.gripper, s.object) <= cfg.grab_radius
        {
            s.holding = true;
        }
        if s.holding {
            s.object = s.gripper;
        }

        if cfg.tv_enabled
            && s.room == Room::Tv
            && s.gripper_closed
            && !s.tv_on
            && dist(s.gripper, TV_CENTER) <= cfg.tv_radius
        {
            s.tv_on = true;
            self.resample_distractor(&mut s, rng);
        } else if was_on && rng.gen::<f64>() < cfg.tv_resample_prob {
            self.resample_distractor(&mut s, rng);
        }
        s
    }

    fn resample_distractor<R: Rng + ?Sized>(&self, s: &mut EnvState, rng: &mut R) {
        s.tv_pattern_seed = rng.gen();
        s.background_variant = rng.gen_range(0..self.config.n_background_variants);
    }

    pub fn render(&self, s: &EnvState) -> Image {
        let n = self.config.image_size;
        let bg = match s.room {
            Room::Start => START_BG,
            Room::Object => OBJECT_BG,
            Room::Tv => TV_BGS[s.background_variant as usize % TV_BGS.len()],
        };
        let mut img = Image::filled(n, n, bg);

        // Walls with door gaps on the shared sides.
        let door = self.px_span(0.5 - self.config.door_width / 2.0, 0.5 + self.config.door_width / 2.0);
        let (west_door, east_door) = match s.room {
            Room::Start => (true, true),
            Room::Object => (true, false),
            Room::Tv => (false, true),
        };
        img.fill_rect(0, 0, 1, n, WALL);
        img.fill_rect(n - 1, 0, n, n, WALL);
        for r in 0..n {
            let gap = r >= door.0 && r < door.1;
            if !(west_door && gap) {
                img.set_pixel(r, 0, WALL);
            }
            if !(east_door && gap) {
                img.set_pixel(r, n - 1, WALL);
            }
        }

        match s.room {
            Room::Start => {
                for m in START_MARKERS {
                    let (r, c) = self.cell(m);
                    img.fill_rect(r.saturating_sub(1), c.saturating_sub(1), r + 1, c + 1, MARKER);
                }
            }
            Room::Tv => {
                let (c0, c1) = self.px_span(TV_RECT[0], TV_RECT[1]);
                let (r0, r1) = self.px_span(TV_RECT[2], TV_RECT[3]);
                if s.tv_on {
                    for r in r0..r1 {
                        for c in c0..c1 {
                            let block = ((((r - r0) / TV_BLOCK_PX) << 8) | ((c - c0) / TV_BLOCK_PX)) as u64;
                            img.set_pixel(r, c, pattern_color(s.tv_pattern_seed, block));
                        }
                    }
                } else {
                    img.fill_rect(r0, c0, r1, c1, TV_OFF);
                }
            }
            Room::Object => {
                let (r, c) = self.cell(s.object);
                img.fill_rect(r.saturating_sub(2), c.saturating_sub(2), r + 2, c + 2, OBJECT_COLOR);
            }
        }

        let (r, c) = self.cell(s.gripper);
        let color = if s.gripper_closed { GRIPPER_CLOSED } else { GRIPPER_OPEN };
        img.fill_rect(r.saturating_sub(1), c.saturating_sub(1), r + 2, c + 2, color);
        img
    }

    /// Pixel cell `(row, col)` containing a room-local position.
    pub fn cell(&self, p: [f64; 2]) -> (usize, usize) {
        let n = self.config.image_size;
        let q = |v: f64| ((v * n as f64).floor() as usize).min(n - 1);
        (q(p[1]), q(p[0]))
    }

    fn px_span(&self, lo: f64, hi: f64) -> (usize, usize) {
        let n = self.config.image_size as f64;
        ((lo * n).floor() as usize, (hi * n).floor() as usize)
    }

    /// The 25 Object-room goals: every (gripper, object) pair of canonical
    /// locations, rendered with the TV off.
    pub fn build_test_set(&self) -> Vec<GoalSpec> {
        let mut out = Vec::with_capacity(25);
        for g in Location::ALL {
            for o in Location::ALL {
                let state = EnvState {
                    room: Room::Object,
                    gripper: g.position(),
                    gripper_closed: false,
                    object: o.position(),
                    holding: false,
                    tv_on: false,
                    tv_pattern_seed: 0,
                    background_variant: 0,
                };
                out.push(GoalSpec {
                    gripper_location: g,
                    object_location: o,
                    gripper_target: g.position(),
                    object_target: o.position(),
                    image: self.render(&state),
                    state,
                });
            }
        }
        out
    }
}

/// True iff the final state is in the Object room with both the gripper and
/// the object strictly within [`SUCCESS_TOLERANCE`] (L∞) of their targets.
pub fn evaluate_success(goal: &GoalSpec, final_state: &EnvState) -> bool {
    final_state.room == Room::Object
        && within_tolerance(linf(final_state.gripper, goal.gripper_target))
        && within_tolerance(linf(final_state.object, goal.object_target))
}

/// Strict comparison with a rounding margin, so that an offset written as
/// `target + 0.2` counts as exactly on the boundary.
fn within_tolerance(err: f64) -> bool {
    err < SUCCESS_TOLERANCE - 1e-9
}

pub fn visible_entities(s: &EnvState) -> BTreeSet<Entity> {
    let mut set = BTreeSet::from([Entity::Gripper]);
    match s.room {
        Room::Start => {
            set.insert(Entity::StartMarkers);
        }
        Room::Object => {
            set.insert(Entity::Object);
        }
        Room::Tv => {
            set.insert(if s.tv_on { Entity::TvOn } else { Entity::TvOff });
        }
    }
    set
}

/// F1 of the final state's visible entities against the goal's.
pub fn f1_visible(goal: &EnvState, final_state: &EnvState) -> f64 {
    f1_score(&visible_entities(goal), &visible_entities(final_state))
}

pub(crate) fn f1_score<T: Ord>(truth: &BTreeSet<T>, predicted: &BTreeSet<T>) -> f64 {
    let tp = truth.intersection(predicted).count() as f64;
    let precision = if predicted.is_empty() { 0.0 } else { tp / predicted.len() as f64 };
    let recall = if truth.is_empty() { 0.0 } else { tp / truth.len() as f64 };
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn linf(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
}

fn pattern_color(seed: u64, block: u64) -> Rgb {
    let h = splitmix64(seed ^ block.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let ch = |shift: u32| ((h >> shift) & 0xFF) as f32 / 255.0;
    [ch(0), ch(8), ch(16)]
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
