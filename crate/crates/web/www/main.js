import init, { examples, plan, narrate, why } from "./pkg/fabula_web.js";

const $ = (id) => document.getElementById(id);
let worlds = [];
let current = null;

function inputs() {
  return [$("domain").value, $("problem").value];
}

function showError(e) {
  $("error").textContent = e ? String(e.message ?? e) : "";
}

function showPlan(planJson) {
  current = planJson;
  const doc = JSON.parse(planJson);
  const frames = doc.frames.map((f) => `frame ${f.id}: ${f.character} intends ${f.goal}`);
  $("steps").textContent = doc.steps.map((s) => `${s.number}. ${s.text}`).concat(frames).join("\n");
  $("step").replaceChildren(
    ...doc.steps.filter((s) => !s.happening).map((s) => new Option(`${s.number}. ${s.text}`, s.number)),
  );
  try {
    $("story").textContent = narrate(...inputs(), planJson, $("templates").value);
  } catch (e) {
    $("story").textContent = "";
    showError(e);
  }
}

function loadWorld(name) {
  const w = worlds.find((w) => w.name === name);
  $("domain").value = w.domain;
  $("problem").value = w.problem;
  $("templates").value = w.templates;
  $("rules").value = w.rules;
  $("steps").textContent = $("story").textContent = $("question").textContent = "";
  $("answers").replaceChildren();
  $("step").replaceChildren();
  showError(null);
  current = null;
  if (w.plan) {
    $("algorithm").value = "ipocl";
    showPlan(w.plan);
  }
}

function runPlan() {
  showError(null);
  $("steps").textContent = "searching...";
  setTimeout(() => {
    try {
      const out = JSON.parse(plan(...inputs(), $("rules").value, $("algorithm").value));
      showPlan(out.plan);
      $("steps").textContent += `\n\n${out.stats.generated} nodes generated, depth ${out.stats.depth}`;
    } catch (e) {
      $("steps").textContent = "";
      showError(e);
    }
  }, 0);
}

function ask() {
  if (!current) return;
  showError(null);
  try {
    const out = JSON.parse(why(...inputs(), current, $("templates").value, $("algorithm").value, $("step").value));
    $("question").textContent = out.question || "(no candidate answers)";
    $("answers").replaceChildren(
      ...out.answers.map((a) => {
        const li = document.createElement("li");
        li.className = a.prediction;
        li.textContent = `${a.answer} (${a.prediction})`;
        return li;
      }),
    );
  } catch (e) {
    showError(e);
  }
}

await init();
worlds = JSON.parse(examples());
$("world").replaceChildren(...worlds.map((w) => new Option(w.name, w.name)));
$("world").addEventListener("change", (e) => loadWorld(e.target.value));
$("plan").addEventListener("click", runPlan);
$("why").addEventListener("click", ask);
loadWorld(worlds[0].name);
