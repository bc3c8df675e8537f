import { ServiceClient } from "./api";
import { PlaybackClock } from "./timeline";
import { SkeletonViewer, SideBySidePlayer } from "./viewer";
import { loadWorkspace, Workspace } from "./workspace";

const client = new ServiceClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

let workspace: Workspace | null = null;
let clock: PlaybackClock | null = null;
let viewer: SkeletonViewer | null = null;
let comparison: SideBySidePlayer | null = null;
let comparisonClock: PlaybackClock | null = null;

function renderCards(): void {
  if (!workspace) return;
  const container = el<HTMLDivElement>("cards");
  container.innerHTML = "";
  workspace.cards.forEach((card, index) => {
    const node = document.createElement("div");
    node.className = "card";
    if (workspace!.isMotionless(index)) node.classList.add("motionless");
    if (index === workspace!.selectedCard) node.classList.add("selected");
    if (card.dirty) node.classList.add("dirty");
    if (card.conflicted) node.classList.add("conflicted");

    const label = document.createElement("div");
    label.className = "range";
    label.textContent = `#${index} [${card.start}, ${card.end})`;
    node.appendChild(label);

    const input = document.createElement("textarea");
    input.value = card.text;
    input.placeholder = "(motionless)";
    input.addEventListener("input", () => queueSuggestions(input.value, index));
    input.addEventListener("change", async () => {
      try {
        await workspace!.saveSnippetText(index, input.value);
      } catch {
        toast(`save of snippet ${index} rejected; kept locally`);
      }
      renderCards();
    });
    node.appendChild(input);
    container.appendChild(node);
  });
}

let suggestTimer: ReturnType<typeof setTimeout> | null = null;

function queueSuggestions(text: string, index: number): void {
  if (suggestTimer) clearTimeout(suggestTimer);
  if (!text.trim()) return;
  suggestTimer = setTimeout(async () => {
    if (!workspace) return;
    try {
      const suggestions = await workspace.suggestionsFor(text);
      const panel = el<HTMLDivElement>("suggestions");
      panel.innerHTML = "";
      for (const s of suggestions) {
        const button = document.createElement("button");
        button.textContent = s.sentence;
        button.addEventListener("click", async () => {
          await workspace!.saveSnippetText(index, s.sentence);
          renderCards();
        });
        panel.appendChild(button);
      }
    } catch {
      // suggestion failures are non-fatal
    }
  }, 150);
}

function toast(message: string): void {
  const node = el<HTMLDivElement>("toast");
  node.textContent = message;
  node.classList.add("visible");
  setTimeout(() => node.classList.remove("visible"), 4000);
}

function animate(now: number): void {
  if (workspace && clock && viewer) {
    const cursor = clock.tick(now);
    viewer.drawFrame(cursor);
    const scrubber = el<HTMLInputElement>("scrubber");
    if (clock.isPlaying) scrubber.value = String(Math.floor(cursor));
    const selected = workspace.selectFrame(cursor);
    document.querySelectorAll("#cards .card").forEach((node, index) => {
      node.classList.toggle("selected", index === selected);
    });
  }
  if (comparison && comparisonClock) {
    comparison.draw(comparisonClock.tick(now));
  }
  requestAnimationFrame(animate);
}

async function openMotion(motionId: string): Promise<void> {
  try {
    workspace = await loadWorkspace(client, motionId);
  } catch (error) {
    toast(`failed to load ${motionId}: ${String(error)}; retry from the list`);
    return;
  }
  clock = new PlaybackClock(workspace.frameCount, workspace.fps);
  viewer = new SkeletonViewer(el<HTMLCanvasElement>("viewer"));
  viewer.setFrames(workspace.positions);
  viewer.drawFrame(0);
  const scrubber = el<HTMLInputElement>("scrubber");
  scrubber.max = String(workspace.frameCount - 1);
  scrubber.value = "0";
  el<HTMLSpanElement>("motion-title").textContent = motionId;
  renderCards();
}

async function boot(): Promise<void> {
  const { ids } = await client.listMotions();
  const list = el<HTMLSelectElement>("motion-list");
  list.innerHTML = "";
  for (const id of ids) {
    const option = document.createElement("option");
    option.value = id;
    option.textContent = id;
    list.appendChild(option);
  }
  list.addEventListener("change", () => openMotion(list.value));

  el<HTMLInputElement>("scrubber").addEventListener("input", (event) => {
    const frame = Number((event.target as HTMLInputElement).value);
    clock?.pause();
    clock?.seek(frame);
    viewer?.drawFrame(frame);
    if (workspace) {
      workspace.selectFrame(frame);
      renderCards();
    }
  });
  el<HTMLButtonElement>("play").addEventListener("click", () => {
    if (!clock) return;
    if (clock.isPlaying) clock.pause();
    else clock.play();
  });
  el<HTMLButtonElement>("regenerate").addEventListener("click", async () => {
    if (!workspace) return;
    workspace.coarseText = el<HTMLInputElement>("coarse").value;
    try {
      const result = await workspace.requestRegeneration();
      if (!result) {
        toast("regeneration queued behind the active request");
        return;
      }
      const left = new SkeletonViewer(el<HTMLCanvasElement>("pane-original"));
      left.setFrames(result.initialPositions);
      const right = new SkeletonViewer(el<HTMLCanvasElement>("pane-edited"));
      right.setFrames(result.editedPositions);
      comparison = new SideBySidePlayer(left, right);
      comparisonClock = new PlaybackClock(result.initialPositions.length, 20);
      comparisonClock.play();
      el<HTMLDivElement>("edited-ranges").textContent =
        result.editedIndices.length > 0
          ? `edited snippets: ${result.editedIndices.join(", ")}`
          : "no snippet edits";
    } catch (error) {
      toast(`regeneration failed: ${String(error)}`);
    }
  });

  if (ids.length > 0) await openMotion(ids[0]);
  requestAnimationFrame(animate);
}

boot().catch((error) => toast(`service unreachable: ${String(error)}`));
