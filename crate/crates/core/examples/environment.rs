//! Drives the three-room playground: moves into the TV room, switches the TV
//! on and shows that only the TV screen changes from step to step.

use grimgep::env::{evaluate_success, f1_visible, visible_entities, Action, Env, EnvConfig, Room};
use grimgep::rng::{stream, Stream};

fn shade(v: f32) -> char {
    [' ', '.', ':', '+', '#'][((v * 4.99) as usize).min(4)]
}

fn main() {
    let env = Env::new(EnvConfig::default());
    let mut rng = stream(0, Stream::Env);
    let mut s = env.reset(0);
    println!("reset: {:?} gripper {:?}", s.room, s.gripper);

    // Walk west through the door into the TV room, then press the button.
    for _ in 0..40 {
        s = env.step(&s, Action::new(-0.1, 0.0, -1.0), &mut rng);
        if s.room == Room::Tv {
            break;
        }
    }
    println!("after walking west: {:?}, visible {:?}", s.room, visible_entities(&s));
    for _ in 0..40 {
        s = env.step(&s, Action::new(-0.1, -0.1, 1.0), &mut rng);
        if s.tv_on {
            break;
        }
    }
    println!("tv on: {}", s.tv_on);

    let img = env.render(&s);
    for r in 0..img.height() {
        let line: String = (0..img.width()).map(|c| shade(img.get(r, c, 0))).collect();
        println!("  {line}");
    }

    let test_set = env.build_test_set();
    let goal = &test_set[0];
    println!(
        "test set: {} goals; first asks for gripper {:?} and object {:?}",
        test_set.len(),
        goal.gripper_location,
        goal.object_location
    );
    println!("success from here: {}, F1: {:.2}", evaluate_success(goal, &s), f1_visible(&goal.state, &s));
}
