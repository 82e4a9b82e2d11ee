# native-strategy: delivery-one-gripper
def get_plan(objects, init, goal):
    grippers = sorted(name for name, kind in objects if kind == "gripper")[:1]
    robby = None
    ball_at = {}
    carry = {}
    for atom in init:
        if atom[0] == "at-robby":
            robby = atom[1]
        elif atom[0] == "at":
            ball_at[atom[1]] = atom[2]
        elif atom[0] == "carry":
            carry[atom[2]] = atom[1]
    target = {atom[1]: atom[2] for atom in goal if atom[0] == "at"}

    plan = []
    while True:
        for g in grippers:
            b = carry.get(g)
            if b is not None and target.get(b, robby) == robby:
                plan.append(f"(drop {b} {robby} {g})")
                ball_at[b] = robby
                del carry[g]
        for g in grippers:
            if g in carry:
                continue
            waiting = sorted(b for b, r in ball_at.items() if r == robby and target.get(b, r) != r)
            if not waiting:
                break
            b = waiting[0]
            plan.append(f"(pick {b} {robby} {g})")
            del ball_at[b]
            carry[g] = b
        if carry:
            dest = target[carry[sorted(carry)[0]]]
        else:
            misplaced = sorted((b, r) for b, r in ball_at.items() if target.get(b, r) != r)
            if not misplaced:
                return plan
            dest = misplaced[0][1]
        plan.append(f"(move {robby} {dest})")
        robby = dest
